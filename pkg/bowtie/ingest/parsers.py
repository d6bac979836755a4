"""
Input parsers and writers
Edge lists, adjacency lists, and account metadata CSV files
"""
import csv
import logging
import os
from datetime import date
from typing import Dict, Iterator, List, Optional, Tuple

from bowtie.errors import InputError, ParseError
from bowtie.graph_core import MAX_EXTERNAL_ID, DEFAULT_CHUNK_ARCS, build_graph
from bowtie.models.models import (
    FLAG_EXPERT, FLAG_VERIFIED, AccountStatus, Dataset, NodeMeta
)
from bowtie.utils import atomic_open, read_text_lines

logger = logging.getLogger(__name__)

INPUT_FORMATS = ('edge-list', 'adjacency')

METADATA_COLUMNS = ('id', 'created_at', 'tweets', 'api_followers', 'api_followings', 'protected', 'status')
OPTIONAL_METADATA_COLUMNS = ('verified', 'expert', 'last_tweet_at')

TRUE_VALUES = {'1', 'true', 'yes', 't', 'y'}
FALSE_VALUES = {'0', 'false', 'no', 'f', 'n', ''}

EPOCH = date(1970, 1, 1)


def parse_external_id(token: str, path: Optional[str] = None, line: Optional[int] = None) -> int:
    """Parse one decimal account ID in [0, 2^64 - 1]"""
    token = token.strip()
    if not (token.isascii() and token.isdigit()):
        raise ParseError(f"invalid node id '{token}'", path, line)
    value = int(token)
    if value > MAX_EXTERNAL_ID:
        raise ParseError(f"node id {token} exceeds 2^64-1", path, line)
    return value


def parse_edge_list(path: str) -> Iterator[Tuple[int, int]]:
    """
    Stream arcs from an edge list

    One arc per line as "src<whitespace>dst" (src follows dst). Lines
    starting with '#' and blank lines are skipped.

    Yields:
        (src, dst) external IDs in file order
    """
    for line_number, line in enumerate(read_text_lines(path), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        tokens = stripped.split()
        if len(tokens) != 2:
            raise ParseError(f"expected 2 fields, got {len(tokens)}", path, line_number)
        yield (parse_external_id(tokens[0], path, line_number),
               parse_external_id(tokens[1], path, line_number))


def parse_adjacency_list(path: str) -> Iterator[Tuple[int, Optional[int]]]:
    """
    Stream arcs from an adjacency list

    Lines look like "src:dst1,dst2,..." listing the followings of src.
    "src:" declares src without arcs, yielded as (src, None).
    """
    for line_number, line in enumerate(read_text_lines(path), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        if ':' not in stripped:
            raise ParseError("missing ':' after source id", path, line_number)
        head, tail = stripped.split(':', 1)
        src = parse_external_id(head, path, line_number)
        tail = tail.strip()
        if not tail:
            yield src, None
            continue
        for token in tail.split(','):
            yield src, parse_external_id(token, path, line_number)


def iter_arcs(path: str, input_format: str) -> Iterator[Tuple[int, Optional[int]]]:
    """Dispatch to the parser for an input format"""
    if input_format == 'edge-list':
        return parse_edge_list(path)
    if input_format == 'adjacency':
        return parse_adjacency_list(path)
    raise InputError(f"Unknown input format '{input_format}'. Choose: {', '.join(INPUT_FORMATS)}")


def _parse_bool(value: str, column: str, path: str, row: int) -> bool:
    key = value.strip().lower()
    if key in TRUE_VALUES:
        return True
    if key in FALSE_VALUES:
        return False
    raise ParseError(f"invalid boolean '{value}' in column {column}", path, row)


def _parse_count(value: str, column: str, path: str, row: int) -> int:
    value = value.strip()
    if not (value.isascii() and value.isdigit()):
        raise ParseError(f"invalid count '{value}' in column {column}", path, row)
    return int(value)


def _parse_date(value: str, column: str, path: str, row: int, today: date) -> date:
    try:
        parsed = date.fromisoformat(value.strip())
    except ValueError:
        raise ParseError(f"invalid date '{value}' in column {column}", path, row)
    if not EPOCH <= parsed <= today:
        raise ParseError(f"date {parsed.isoformat()} in column {column} outside [1970-01-01, {today.isoformat()}]",
                         path, row)
    return parsed


def load_metadata(path: str, today: Optional[date] = None) -> Dict[int, NodeMeta]:
    """
    Load account metadata

    CSV header: id,created_at,tweets,api_followers,api_followings,protected,status
    with optional verified, expert and last_tweet_at columns.

    Args:
        path: CSV file
        today: Upper bound for dates (defaults to the current date)

    Returns:
        ExternalId -> NodeMeta
    """
    today = today or date.today()
    table: Dict[int, NodeMeta] = {}
    reader = csv.DictReader(read_text_lines(path))
    header = [h.strip() for h in (reader.fieldnames or [])]
    missing = [c for c in METADATA_COLUMNS if c not in header]
    if missing:
        raise ParseError(f"metadata header missing columns: {', '.join(missing)}", path, 1)
    reader.fieldnames = header

    # row 1 is the header
    for row_number, row in enumerate(reader, start=2):
        if None in row or any(row[c] is None for c in METADATA_COLUMNS):
            raise ParseError("wrong number of fields", path, row_number)
        node_id = parse_external_id(row['id'], path, row_number)
        if node_id in table:
            raise ParseError(f"duplicate id {node_id}", path, row_number)

        status_value = row['status'].strip().lower()
        try:
            status = AccountStatus(status_value)
        except ValueError:
            raise ParseError(f"unknown status '{row['status']}'", path, row_number)

        flags = set()
        if row.get('verified') and _parse_bool(row['verified'], 'verified', path, row_number):
            flags.add(FLAG_VERIFIED)
        if row.get('expert') and _parse_bool(row['expert'], 'expert', path, row_number):
            flags.add(FLAG_EXPERT)
        last_tweet = row.get('last_tweet_at') or ''

        table[node_id] = NodeMeta(
            created_at=_parse_date(row['created_at'], 'created_at', path, row_number, today),
            tweet_count=_parse_count(row['tweets'], 'tweets', path, row_number),
            api_followers=_parse_count(row['api_followers'], 'api_followers', path, row_number),
            api_followings=_parse_count(row['api_followings'], 'api_followings', path, row_number),
            protected=_parse_bool(row['protected'], 'protected', path, row_number),
            status=status,
            flags=frozenset(flags),
            last_tweet_at=(_parse_date(last_tweet, 'last_tweet_at', path, row_number, today)
                           if last_tweet.strip() else None),
        )

    logger.info("loaded metadata for %d accounts from %s", len(table), path)
    return table


def load_dataset(edges_path: str, input_format: str = 'edge-list', meta_path: Optional[str] = None,
                 chunk_arcs: int = DEFAULT_CHUNK_ARCS) -> Dataset:
    """
    Parse an arc file and optional metadata into a Dataset

    Accounts that only appear in the metadata become isolated nodes and are
    flagged `isolated`; IDs the arc file mentions (including bare adjacency
    declarations) are never flagged.
    """
    meta = load_metadata(meta_path) if meta_path else {}
    graph = build_graph(iter_arcs(edges_path, input_format), nodes=meta.keys(), chunk_arcs=chunk_arcs)

    isolated = graph.declared_only

    provenance = {
        'edges': os.path.basename(edges_path),
        'format': input_format,
        'metadata': os.path.basename(meta_path) if meta_path else None,
        'dropped_duplicates': graph.dropped_duplicates,
        'dropped_self_loops': graph.dropped_self_loops,
        'metadata_only_accounts': int(isolated.size),
    }
    return Dataset.from_graph(graph, meta, isolated_ids=isolated.tolist(), provenance=provenance)


def write_edge_list(arcs, path: str):
    """Write (src, dst) pairs one per line"""
    with atomic_open(path) as f:
        for u, v in arcs:
            f.write(f"{u} {v}\n")


def _format_flag(value: bool) -> str:
    return '1' if value else '0'


def write_metadata(meta: Dict[int, NodeMeta], path: str):
    """Write a metadata table in the load_metadata format, sorted by id"""
    with atomic_open(path) as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(METADATA_COLUMNS + OPTIONAL_METADATA_COLUMNS)
        for node_id in sorted(meta):
            record = meta[node_id]
            writer.writerow((
                node_id,
                record.created_at.isoformat() if record.created_at else '',
                record.tweet_count,
                record.api_followers,
                record.api_followings,
                _format_flag(record.protected),
                record.status.value,
                _format_flag(FLAG_VERIFIED in record.flags),
                _format_flag(FLAG_EXPERT in record.flags),
                record.last_tweet_at.isoformat() if record.last_tweet_at else '',
            ))


def load_label_sets(path: str, default_name: str = 'labels') -> Dict[str, List[int]]:
    """
    Load external label sets

    One account per line as "id" or "id,set_name"; lines without a set name
    belong to `default_name`.

    Returns:
        set name -> external IDs in file order
    """
    sets: Dict[str, List[int]] = {}
    for line_number, line in enumerate(read_text_lines(path), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        head, _, name = stripped.partition(',')
        name = name.strip() or default_name
        sets.setdefault(name, []).append(parse_external_id(head, path, line_number))
    logger.info("loaded %d label sets from %s", len(sets), path)
    return sets
