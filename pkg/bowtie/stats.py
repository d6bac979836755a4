"""
Per-component statistics
Shares of accounts, arcs and tweets; zero-activity profiles; CCDFs; the
abandoned-account heuristic; outlier top-k; external label cross-tabulation.

"Followers" and "followings" always mean graph in- and out-degree.
API-reported counts are only used by degree validation.
"""
import logging
from dataclasses import dataclass
from datetime import date
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from bowtie.errors import ContractViolation, EmptyGraphError
from bowtie.macrostructure import Classification
from bowtie.models.models import LABEL_COUNT, AccountStatus, ComponentLabel, Dataset
from bowtie.utils import format_percent, write_csv

logger = logging.getLogger(__name__)

CCDF_METRICS = ('in_degree', 'out_degree', 'tweets', 'age_months', 'activity_months')


def _check_aligned(d: Dataset, c: Classification):
    if c.node_count != d.node_count:
        raise ContractViolation(f"classification covers {c.node_count} nodes but dataset has {d.node_count}")


def _label_sums(c: Classification, values: np.ndarray) -> np.ndarray:
    """Exact integer sum of `values` per label"""
    sums = np.zeros(LABEL_COUNT, dtype=np.int64)
    np.add.at(sums, c.labels, values.astype(np.int64))
    return sums


def months_between(start: np.ndarray, end: Union[date, np.ndarray]) -> np.ndarray:
    """Whole calendar months from each start date to end (floor)"""
    start = start.astype('datetime64[D]')
    end = np.asarray(np.datetime64(end, 'D') if isinstance(end, date) else end, dtype='datetime64[D]')
    start_month = start.astype('datetime64[M]')
    end_month = end.astype('datetime64[M]')
    months = (end_month - start_month).astype(np.int64)
    start_day = (start - start_month.astype('datetime64[D]')).astype(np.int64)
    end_day = (end - end_month.astype('datetime64[D]')).astype(np.int64)
    return months - (end_day < start_day)


def _resolve_component(component) -> ComponentLabel:
    if isinstance(component, ComponentLabel):
        return component
    try:
        if isinstance(component, int):
            return ComponentLabel(component)
        return ComponentLabel.parse(str(component))
    except ValueError as e:
        raise ContractViolation(str(e))


# ============================================================================
# COMPONENT PROFILE
# ============================================================================

@dataclass(frozen=True)
class ComponentProfile:
    """Per-label totals; percentages are derived against dataset totals"""
    accounts: np.ndarray
    followers: np.ndarray
    followings: np.ndarray
    tweets: np.ndarray
    no_follower: np.ndarray
    no_following: np.ndarray
    no_tweet: np.ndarray
    total_accounts: int
    total_arcs: int
    total_tweets: int

    def row(self, label: ComponentLabel) -> dict:
        """One component's line of the profile table"""
        members = int(self.accounts[label])
        return {
            'accounts': members,
            'accounts_pct': format_percent(members, self.total_accounts),
            'followers': int(self.followers[label]),
            'followers_pct': format_percent(int(self.followers[label]), self.total_arcs),
            'followings': int(self.followings[label]),
            'followings_pct': format_percent(int(self.followings[label]), self.total_arcs),
            'tweets': int(self.tweets[label]),
            'tweets_pct': format_percent(int(self.tweets[label]), self.total_tweets),
            'no_follower_pct': format_percent(int(self.no_follower[label]), members),
            'no_following_pct': format_percent(int(self.no_following[label]), members),
            'no_tweet_pct': format_percent(int(self.no_tweet[label]), members),
        }

    def to_dict(self) -> dict:
        return {
            'components': {label.name: self.row(label) for label in ComponentLabel},
            'total_accounts': self.total_accounts,
            'total_arcs': self.total_arcs,
            'total_tweets': self.total_tweets
        }


def component_profile(d: Dataset, c: Classification) -> ComponentProfile:
    """
    Accounts, follower arcs, following arcs and tweets per component

    Follower sums add members' in-degrees and following sums their
    out-degrees, so the two differ per component but both total M.
    """
    _check_aligned(d, c)
    in_deg = d.graph.in_degrees()
    out_deg = d.graph.out_degrees()
    return ComponentProfile(
        accounts=c.counts(),
        followers=_label_sums(c, in_deg),
        followings=_label_sums(c, out_deg),
        tweets=_label_sums(c, d.tweets),
        no_follower=_label_sums(c, in_deg == 0),
        no_following=_label_sums(c, out_deg == 0),
        no_tweet=_label_sums(c, d.tweets == 0),
        total_accounts=d.node_count,
        total_arcs=d.graph.arc_count,
        total_tweets=int(d.tweets.sum()),
    )


# ============================================================================
# CCDF
# ============================================================================

@dataclass(frozen=True)
class Ccdf:
    """Complementary CDF: fraction of the population with value >= x"""
    metric: str
    component: Optional[ComponentLabel]
    filter_zeros: bool
    values: np.ndarray
    fractions: np.ndarray
    population: int

    def points(self) -> List[Tuple[int, float]]:
        return list(zip(self.values.tolist(), self.fractions.tolist()))

    def write(self, path: str):
        write_csv(path, ('value', 'ccdf'), self.points())


def ccdf_points(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Distinct sorted values and the fraction of entries at or above each"""
    if values.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
    distinct, counts = np.unique(values, return_counts=True)
    at_or_above = np.cumsum(counts[::-1])[::-1]
    return distinct, at_or_above / values.size


def metric_values(d: Dataset, metric: str, reference_date: Optional[date] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-node values of a metric and the mask of nodes where it is defined

    Args:
        metric: in_degree, out_degree, tweets, age_months, activity_months
        reference_date: End point for age_months (default: latest creation date)
    """
    n = d.node_count
    if metric == 'in_degree':
        return d.graph.in_degrees(), np.ones(n, dtype=bool)
    if metric == 'out_degree':
        return d.graph.out_degrees(), np.ones(n, dtype=bool)
    if metric == 'tweets':
        return d.tweets, np.ones(n, dtype=bool)
    if metric == 'age_months':
        known = ~np.isnat(d.created_at)
        reference = reference_date or d.max_created_at()
        values = np.zeros(n, dtype=np.int64)
        if reference is None:
            return values, known
        if known.any() and d.created_at[known].max() > np.datetime64(reference, 'D'):
            raise ContractViolation(f"reference date {reference} precedes an account creation date")
        values[known] = months_between(d.created_at[known], reference)
        return values, known
    if metric == 'activity_months':
        known = ~np.isnat(d.created_at) & ~np.isnat(d.last_tweet_at)
        values = np.zeros(n, dtype=np.int64)
        values[known] = months_between(d.created_at[known], d.last_tweet_at[known])
        return values, known
    raise ContractViolation(f"Unknown metric '{metric}'. Choose: {', '.join(CCDF_METRICS)}")


def ccdf(d: Dataset, c: Classification, metric: str, component, filter_zeros: bool = False,
         reference_date: Optional[date] = None) -> Ccdf:
    """
    CCDF of a metric over one component's members

    Args:
        d: Dataset
        c: Classification of d
        metric: One of CCDF_METRICS
        component: ComponentLabel or its name
        filter_zeros: Drop members whose value is 0
        reference_date: End point for account age

    Returns:
        Ccdf; empty when the (filtered) population is empty
    """
    _check_aligned(d, c)
    label = _resolve_component(component)
    values, defined = metric_values(d, metric, reference_date)
    selected = defined & (c.labels == label)
    population = values[selected]
    if filter_zeros:
        population = population[population != 0]
    distinct, fractions = ccdf_points(population)
    return Ccdf(metric=metric, component=label, filter_zeros=filter_zeros,
                values=distinct, fractions=fractions, population=int(population.size))


# ============================================================================
# DEGREE SUMMARY
# ============================================================================

def _nearest_rank(sorted_values: np.ndarray, numerator: int, denominator: int) -> int:
    """Nearest-rank percentile: the ceil(p * n)-th smallest value"""
    n = sorted_values.size
    rank = max(1, -(-numerator * n // denominator))
    return int(sorted_values[rank - 1])


def degree_summary(d: Dataset, direction: str = 'in') -> Dict[str, float]:
    """
    Mean, median and 90th percentile of node degree

    Raises:
        EmptyGraphError: no nodes to summarise
    """
    g = d.graph
    if g.node_count == 0:
        raise EmptyGraphError("degree summary is undefined on an empty graph")
    if direction not in ('in', 'out'):
        raise ContractViolation(f"direction must be 'in' or 'out', got '{direction}'")
    degrees = np.sort(g.in_degrees() if direction == 'in' else g.out_degrees())
    return {
        'direction': direction,
        'nodes': int(degrees.size),
        'mean': float(Fraction(int(degrees.sum()), int(degrees.size))),
        'median': _nearest_rank(degrees, 1, 2),
        'p90': _nearest_rank(degrees, 9, 10),
        'max': int(degrees[-1])
    }


# ============================================================================
# ABANDONED ACCOUNTS
# ============================================================================

def abandoned_fraction(d: Dataset, c: Classification, max_followers: int = 1, max_followings: int = 1,
                       min_age_months: int = 6, require_no_tweet: bool = False,
                       reference_date: Optional[date] = None) -> Dict[str, dict]:
    """
    Fraction of each component's accounts that look abandoned

    An account qualifies with in-degree <= max_followers, out-degree <=
    max_followings, age >= min_age_months and, when required, no tweet.
    Accounts without a creation date only pass a zero age threshold.

    Returns:
        label name -> {'members', 'abandoned', 'fraction'}
    """
    _check_aligned(d, c)
    if min(max_followers, max_followings, min_age_months) < 0:
        raise ContractViolation("abandoned-account thresholds must be >= 0")

    g = d.graph
    qualifies = (g.in_degrees() <= max_followers) & (g.out_degrees() <= max_followings)
    if min_age_months > 0:
        age, known = metric_values(d, 'age_months', reference_date)
        qualifies &= known & (age >= min_age_months)
    if require_no_tweet:
        qualifies &= d.tweets == 0

    members = c.counts()
    abandoned = _label_sums(c, qualifies)
    report = {}
    for label in ComponentLabel:
        total = int(members[label])
        report[label.name] = {
            'members': total,
            'abandoned': int(abandoned[label]),
            'fraction': float(Fraction(int(abandoned[label]), total)) if total else 0.0
        }
    return report


# ============================================================================
# OUTLIERS
# ============================================================================

class OutlierCategory(str, Enum):
    TOP_FOLLOWED = 'top_followed'
    TOP_FOLLOWING = 'top_following'
    TOP_TWEETING = 'top_tweeting'
    TOP_FOLLOWING_LE1_FOLLOWER = 'top_following_le1_follower'
    TOP_TWEETING_LE1_FOLLOWER = 'top_tweeting_le1_follower'


@dataclass(frozen=True)
class OutlierReport:
    """Top-k accounts of one category and how they spread over components"""
    category: OutlierCategory
    k: int
    scope: str
    member_ids: List[int]
    member_labels: List[ComponentLabel]
    truncated: bool
    label_prevalence: Optional[Dict[str, Optional[float]]] = None

    def shares(self) -> Dict[str, float]:
        """Percentage of the reported members in each component"""
        counts = np.bincount(np.array(self.member_labels, dtype=np.int64), minlength=LABEL_COUNT)
        total = len(self.member_ids)
        return {label.name: format_percent(int(counts[label]), total) for label in ComponentLabel}

    def to_dict(self) -> dict:
        return {
            'category': self.category.value,
            'k': self.k,
            'scope': self.scope,
            'reported': len(self.member_ids),
            'truncated': self.truncated,
            'shares': self.shares(),
            'label_prevalence': self.label_prevalence,
            'members': self.member_ids
        }


def _category_metric(d: Dataset, category: OutlierCategory) -> Tuple[np.ndarray, np.ndarray]:
    g = d.graph
    in_deg = g.in_degrees()
    everyone = np.ones(d.node_count, dtype=bool)
    if category == OutlierCategory.TOP_FOLLOWED:
        return in_deg, everyone
    if category == OutlierCategory.TOP_FOLLOWING:
        return g.out_degrees(), everyone
    if category == OutlierCategory.TOP_TWEETING:
        return d.tweets, everyone
    if category == OutlierCategory.TOP_FOLLOWING_LE1_FOLLOWER:
        return g.out_degrees(), in_deg <= 1
    return d.tweets, in_deg <= 1


def _top(candidates: np.ndarray, metric: np.ndarray, node_ids: np.ndarray, k: int) -> np.ndarray:
    """Largest metric first, ties by smaller external ID"""
    order = np.lexsort((node_ids[candidates], -metric[candidates].astype(np.int64)))
    return candidates[order[:k]]


def top_k_outliers(d: Dataset, c: Classification, category: Union[OutlierCategory, str], k: int,
                   scope: str = 'global', label_mask: Optional[np.ndarray] = None) -> OutlierReport:
    """
    Top-k accounts by an outlier category

    Args:
        d: Dataset
        c: Classification of d
        category: OutlierCategory or its value
        k: Number of accounts (>= 1)
        scope: 'global' ranks all accounts; 'per_component' takes the top-k inside each component
        label_mask: Optional per-node label (e.g. suspended); its prevalence among each
            component's reported members is included

    Returns:
        OutlierReport, flagged truncated when fewer than k accounts are eligible
    """
    _check_aligned(d, c)
    if k < 1:
        raise ContractViolation("k must be >= 1")
    if scope not in ('global', 'per_component'):
        raise ContractViolation(f"scope must be 'global' or 'per_component', got '{scope}'")
    category = OutlierCategory(category)
    metric, eligible = _category_metric(d, category)

    if scope == 'global':
        candidates = np.flatnonzero(eligible)
        chosen = _top(candidates, metric, d.graph.node_ids, k)
        truncated = candidates.size < k
    else:
        picks = []
        truncated = False
        for label in ComponentLabel:
            candidates = np.flatnonzero(eligible & (c.labels == label))
            if candidates.size == 0:
                continue
            picks.append(_top(candidates, metric, d.graph.node_ids, k))
            truncated = truncated or candidates.size < k
        chosen = np.concatenate(picks) if picks else np.empty(0, dtype=np.int64)

    prevalence = None
    if label_mask is not None:
        prevalence = {}
        for label in ComponentLabel:
            in_component = chosen[c.labels[chosen] == label]
            prevalence[label.name] = (format_percent(int(label_mask[in_component].sum()), int(in_component.size))
                                      if in_component.size else None)

    return OutlierReport(
        category=category,
        k=k,
        scope=scope,
        member_ids=d.graph.node_ids[chosen].tolist(),
        member_labels=[ComponentLabel(int(l)) for l in c.labels[chosen]],
        truncated=bool(truncated),
        label_prevalence=prevalence,
    )


# ============================================================================
# LABEL CROSS-TABULATION
# ============================================================================

@dataclass(frozen=True)
class CrosstabReport:
    """Distribution of a label set over components, and per-component prevalence"""
    name: str
    set_size: int
    per_component: np.ndarray
    absent: int
    component_sizes: np.ndarray

    def distribution(self) -> Dict[str, float]:
        """Share of the label set in each component, plus the absent bucket"""
        view = {label.name: format_percent(int(self.per_component[label]), self.set_size)
                for label in ComponentLabel}
        view['absent'] = format_percent(self.absent, self.set_size)
        return view

    def prevalence(self) -> Dict[str, float]:
        """Share of each component's accounts that carry the label"""
        return {label.name: format_percent(int(self.per_component[label]), int(self.component_sizes[label]))
                for label in ComponentLabel}

    def to_dict(self) -> dict:
        return {
            'label_set': self.name,
            'size': self.set_size,
            'absent': self.absent,
            'distribution': self.distribution(),
            'prevalence': self.prevalence()
        }


def label_crosstab(d: Dataset, c: Classification,
                   label_set: Union[Iterable[int], AccountStatus, np.ndarray],
                   name: str = 'labels') -> CrosstabReport:
    """
    Cross-tabulate an externally supplied label set against components

    Args:
        d: Dataset
        c: Classification of d
        label_set: External IDs, an AccountStatus (status predicate), or a boolean node mask
        name: Name recorded in the report

    Returns:
        CrosstabReport; IDs missing from the dataset land in the absent bucket
    """
    _check_aligned(d, c)
    if isinstance(label_set, AccountStatus):
        mask = d.status_mask(label_set)
        absent = 0
    elif isinstance(label_set, np.ndarray) and label_set.dtype == bool:
        mask = label_set
        absent = 0
    else:
        ids = np.unique(np.fromiter(label_set, dtype=np.uint64))
        present = d.graph.contains(ids)
        mask = np.zeros(d.node_count, dtype=bool)
        mask[d.graph.index_of_many(ids[present])] = True
        absent = int((~present).sum())

    per_component = _label_sums(c, mask)
    return CrosstabReport(
        name=name,
        set_size=int(mask.sum()) + absent,
        per_component=per_component,
        absent=absent,
        component_sizes=c.counts(),
    )


def builtin_label_masks(d: Dataset) -> Dict[str, np.ndarray]:
    """Label sets carried by the metadata itself"""
    return {
        'suspended': d.status_mask(AccountStatus.SUSPENDED),
        'verified': d.verified,
        'expert': d.expert
    }
