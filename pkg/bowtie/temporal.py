"""
Temporal analysis
Approximate past macrostructures by creation-date filtering.

An account exists at date D when it was created on or before D; an arc
exists at D when both of its endpoints exist.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import date
from typing import Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from bowtie.errors import ContractViolation
from bowtie.macrostructure import Classification, MacroSummary, decompose
from bowtie.models.models import LABEL_COUNT, ComponentLabel, Dataset
from bowtie.utils import format_percent, month_grid, write_csv

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Snapshot:
    """The estimated macrostructure of a dataset at one date"""
    as_of: date
    dataset: Dataset
    classification: Classification
    summary: MacroSummary
    excluded_undated: int

    @property
    def node_count(self) -> int:
        return self.dataset.node_count

    @property
    def origin(self) -> str:
        return self.dataset.origin


def snapshot(d: Dataset, as_of: date, method: str = 'scipy') -> Snapshot:
    """
    Keep accounts created on or before as_of and classify the induced graph

    Accounts without a creation date are excluded and counted.
    """
    known = ~np.isnat(d.created_at)
    keep = known & (d.created_at <= np.datetime64(as_of, 'D'))
    excluded = int((~known).sum())
    if excluded:
        logger.warning("%d accounts have no creation date and are left out of the %s snapshot",
                       excluded, as_of.isoformat())

    subset = d.subset(keep, note={'as_of': as_of.isoformat()})
    classification, summary = decompose(subset.graph, method=method)
    logger.info("snapshot %s: %d accounts, %d arcs", as_of.isoformat(),
                subset.node_count, subset.graph.arc_count)
    return Snapshot(as_of=as_of, dataset=subset, classification=classification,
                    summary=summary, excluded_undated=excluded)


@dataclass(frozen=True)
class AttributionReport:
    """Where the accounts created between two snapshots ended up"""
    period_start: date
    period_end: date
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def fractions(self) -> Dict[str, float]:
        total = self.total
        return {label.name: (int(self.counts[label]) / total if total else 0.0) for label in ComponentLabel}

    def rows(self) -> List[Tuple[str, str, int, float]]:
        fractions = self.fractions()
        return [(self.period_end.isoformat(), label.name, int(self.counts[label]), round(fractions[label.name], 6))
                for label in ComponentLabel]

    def to_dict(self) -> dict:
        return {
            'period_start': self.period_start.isoformat(),
            'period_end': self.period_end.isoformat(),
            'new_accounts': {label.name: int(self.counts[label]) for label in ComponentLabel},
            'fractions': self.fractions(),
            'total': self.total
        }


def new_account_attribution(older: Snapshot, newer: Snapshot) -> AttributionReport:
    """
    Bucket the accounts present only in `newer` by their label in `newer`

    Raises:
        ContractViolation: snapshots come from different datasets or are out of order
    """
    if older.origin != newer.origin:
        raise ContractViolation("snapshots were taken from different datasets")
    if older.as_of > newer.as_of:
        raise ContractViolation(f"older snapshot {older.as_of} is later than newer snapshot {newer.as_of}")

    new_accounts = ~np.isin(newer.classification.node_ids, older.classification.node_ids, assume_unique=True)
    counts = np.bincount(newer.classification.labels[new_accounts], minlength=LABEL_COUNT)
    return AttributionReport(period_start=older.as_of, period_end=newer.as_of, counts=counts)


@dataclass(frozen=True)
class AgreementReport:
    """Label agreement between two classifications on their common accounts"""
    common: int
    confusion: np.ndarray

    @property
    def no_overlap(self) -> bool:
        return self.common == 0

    @property
    def fraction(self) -> Optional[float]:
        """Share of common accounts with the same label; None when nothing overlaps"""
        if self.no_overlap:
            return None
        return int(np.trace(self.confusion)) / self.common

    def to_dict(self) -> dict:
        if self.no_overlap:
            return {'success': False, 'message': 'no common accounts', 'common': 0}
        return {
            'success': True,
            'common': self.common,
            'agreement': self.fraction,
            'agreement_pct': format_percent(int(np.trace(self.confusion)), self.common),
            'labels': [label.name for label in ComponentLabel],
            'confusion': self.confusion.astype(int).tolist()
        }


def agreement(a: Classification, b: Classification) -> AgreementReport:
    """
    Compare two classifications on the external IDs they share

    Rows of the confusion matrix are a's labels, columns b's.
    """
    _, in_a, in_b = np.intersect1d(a.node_ids, b.node_ids, assume_unique=True, return_indices=True)
    codes = a.labels[in_a].astype(np.int64) * LABEL_COUNT + b.labels[in_b]
    confusion = np.bincount(codes, minlength=LABEL_COUNT * LABEL_COUNT).reshape(LABEL_COUNT, LABEL_COUNT)
    return AgreementReport(common=int(in_a.size), confusion=confusion)


@dataclass(frozen=True)
class EvolutionSeries:
    """Snapshots on a date grid"""
    snapshots: List[Snapshot]

    def dates(self) -> List[date]:
        return [s.as_of for s in self.snapshots]

    def rows(self) -> List[Tuple[str, str, int, float]]:
        """date,label,count,percent rows"""
        rows = []
        for s in self.snapshots:
            sizes = s.summary.sizes
            for label in ComponentLabel:
                rows.append((s.as_of.isoformat(), label.name, int(sizes[label]),
                             format_percent(int(sizes[label]), s.node_count)))
        return rows

    def attributions(self) -> List[AttributionReport]:
        """New-account attribution for each consecutive pair of snapshots"""
        return [new_account_attribution(older, newer)
                for older, newer in zip(self.snapshots, self.snapshots[1:])]

    def write(self, evolution_path: str, attribution_path: str):
        write_csv(evolution_path, ('date', 'label', 'count', 'percent'), self.rows())
        rows = [row for report in self.attributions() for row in report.rows()]
        write_csv(attribution_path, ('period_end', 'label', 'new_accounts', 'fraction'), rows)


def evolution(d: Dataset, start: date, end: date, step_months: int, method: str = 'scipy',
              threads: int = 1, progress: bool = False) -> EvolutionSeries:
    """
    Snapshots every step_months from start, plus end if it is off the grid

    Args:
        d: Dataset
        start, end: Grid bounds (start <= end)
        step_months: Months between snapshots (>= 1)
        method: SCC backend
        threads: Snapshots computed concurrently; results do not depend on it
        progress: Show a progress bar on stderr
    """
    if start > end:
        raise ContractViolation(f"start {start} is after end {end}")
    if step_months < 1:
        raise ContractViolation("step_months must be >= 1")

    grid = month_grid(start, end, step_months)
    logger.info("computing %d snapshots from %s to %s", len(grid), start.isoformat(), end.isoformat())

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = pool.map(lambda as_of: snapshot(d, as_of, method=method), grid)
        snapshots = list(tqdm(results, total=len(grid), desc='snapshots', disable=not progress))

    counts = [s.node_count for s in snapshots]
    if any(b < a for a, b in zip(counts, counts[1:])):
        raise ContractViolation("snapshot sizes decreased along the date grid")
    return EvolutionSeries(snapshots=snapshots)
