"""
Degree cross-validation
Compare API-reported follower/following counts with degrees computed from the graph
"""
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from bowtie.models.models import Dataset
from bowtie.utils import write_csv, write_json


@dataclass(frozen=True)
class DegreeDiffReport:
    """Histograms of (API-reported - computed) degree per direction"""
    followers: Dict[int, int]
    followings: Dict[int, int]
    population: int

    def zero_fraction(self, direction: str) -> float:
        """Fraction of accounts whose reported and computed degree agree"""
        histogram = self.followers if direction == 'followers' else self.followings
        if self.population == 0:
            return 0.0
        return histogram.get(0, 0) / self.population

    def rows(self) -> List[Tuple[str, int, int]]:
        rows = [('followers', diff, count) for diff, count in self.followers.items()]
        rows += [('followings', diff, count) for diff, count in self.followings.items()]
        return rows

    def to_dict(self) -> dict:
        return {
            'population': self.population,
            'zero_difference_followers': self.zero_fraction('followers'),
            'zero_difference_followings': self.zero_fraction('followings'),
        }

    def write(self, histogram_path: str, summary_path: str):
        write_csv(histogram_path, ('direction', 'difference', 'count'), self.rows())
        write_json(summary_path, self.to_dict())


def _histogram(differences: np.ndarray) -> Dict[int, int]:
    values, counts = np.unique(differences, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


def validate_degrees(d: Dataset) -> DegreeDiffReport:
    """
    Bucket API-reported minus computed degree for every account with metadata

    Args:
        d: Dataset with metadata

    Returns:
        DegreeDiffReport whose histograms each sum to the number of accounts with metadata
    """
    with_meta = d.has_meta
    g = d.graph
    followers = d.api_followers[with_meta] - g.in_degrees()[with_meta]
    followings = d.api_followings[with_meta] - g.out_degrees()[with_meta]
    return DegreeDiffReport(
        followers=_histogram(followers),
        followings=_histogram(followings),
        population=int(with_meta.sum()),
    )
