"""
Shared helpers: atomic output files, text input and calendar arithmetic
"""
import csv
import gzip
import json
import os
import tempfile
from contextlib import contextmanager
from datetime import date
from typing import Iterable, Iterator, List, Sequence

from dateutil.relativedelta import relativedelta

from bowtie.errors import InputError, ParseError


@contextmanager
def atomic_open(path: str, mode: str = 'w') -> Iterator:
    """
    Open a temporary file next to `path` and rename it into place on success

    Nothing is left at `path` if the block raises.
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(prefix='.tmp-', dir=directory)
    try:
        with os.fdopen(fd, mode, encoding='utf-8', newline='') as f:
            yield f
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def write_json(path: str, payload: dict):
    """Write JSON deterministically (insertion order, trailing newline)"""
    with atomic_open(path) as f:
        json.dump(payload, f, indent=2)
        f.write('\n')


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]):
    """Write a CSV file with LF line endings"""
    with atomic_open(path) as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)


def add_months(start: date, months: int) -> date:
    """Add calendar months, clamping to the end of shorter months (Jan 31 + 1 -> Feb 28/29)"""
    return start + relativedelta(months=months)


def month_grid(start: date, end: date, step_months: int) -> List[date]:
    """
    Dates start, start+step, ... up to end, plus end if it is not on the grid

    Each point is computed from `start` so clamping never drifts.
    """
    dates = []
    k = 0
    current = start
    while current <= end:
        dates.append(current)
        k += 1
        current = add_months(start, k * step_months)
    if dates[-1] != end:
        dates.append(end)
    return dates


def format_percent(numerator: int, denominator: int, digits: int = 4) -> float:
    """Percentage rounded only at output"""
    if denominator == 0:
        return 0.0
    return round(100 * numerator / denominator, digits)


def read_text_lines(path: str) -> Iterator[str]:
    """
    Lines of a UTF-8 text file, decompressing .gz transparently

    Each line is decoded on its own so a bad byte is reported on its line.

    Raises:
        InputError: path does not exist
        ParseError: a line is not valid UTF-8
    """
    if not os.path.exists(path):
        raise InputError(f"input file not found: {path}")
    opener = gzip.open if path.endswith('.gz') else open
    with opener(path, 'rb') as f:
        for line_number, raw in enumerate(f, start=1):
            try:
                yield raw.decode('utf-8')
            except UnicodeDecodeError as e:
                raise ParseError(f"invalid UTF-8 byte 0x{raw[e.start]:02x} at column {e.start + 1}",
                                 path, line_number)
