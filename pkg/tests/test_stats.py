"""
Unit tests for per-component statistics
"""
import unittest
import sys
import os
from datetime import date

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from bowtie.errors import ContractViolation, EmptyGraphError
from bowtie.graph_core import DirectedGraph
from bowtie.macrostructure import decompose
from bowtie.models.models import AccountStatus, ComponentLabel as L, Dataset, NodeMeta
from bowtie.stats import (
    OutlierCategory, abandoned_fraction, builtin_label_masks, ccdf, ccdf_points,
    component_profile, degree_summary, label_crosstab, metric_values, months_between,
    top_k_outliers
)
from bowtie.synth import canon11_graph


def canon_dataset(meta=None):
    d = Dataset.from_graph(canon11_graph(), meta)
    c, _ = decompose(d.graph)
    return d, c


class TestComponentProfile(unittest.TestCase):
    """Test per-component totals"""

    def setUp(self):
        meta = {i: NodeMeta(tweet_count=10 * i) for i in range(1, 12)}
        self.d, self.c = canon_dataset(meta)
        self.profile = component_profile(self.d, self.c)

    def test_accounts_and_arcs(self):
        self.assertEqual(self.profile.accounts.tolist(), [2, 1, 1, 1, 2, 1, 1, 2])
        self.assertEqual(self.profile.followers.tolist(), [3, 0, 3, 2, 1, 1, 0, 1])
        self.assertEqual(self.profile.followings.tolist(), [3, 3, 0, 0, 2, 1, 1, 1])

    def test_totals(self):
        self.assertEqual(int(self.profile.accounts.sum()), self.d.node_count)
        self.assertEqual(int(self.profile.followers.sum()), 11)
        self.assertEqual(int(self.profile.tweets.sum()), 660)

    def test_zero_activity(self):
        """Node 4 (IN) and node 8 (one of two OUT tendrils) have no followers"""
        rows = self.profile.to_dict()['components']
        self.assertEqual(rows['IN']['no_follower_pct'], 100.0)
        self.assertEqual(rows['OUT_TENDRILS']['no_follower_pct'], 50.0)
        self.assertEqual(rows['OUT']['no_following_pct'], 100.0)
        self.assertEqual(rows['LSC']['no_tweet_pct'], 0.0)

    def test_misaligned(self):
        d, _ = canon_dataset()
        _, c = canon_dataset()
        with self.assertRaises(ContractViolation):
            component_profile(d.subset(np.arange(11) < 5), c)


class TestCcdf(unittest.TestCase):
    """Test complementary CDFs"""

    def test_points(self):
        values, fractions = ccdf_points(np.array([1, 1, 2, 5]))
        self.assertEqual(values.tolist(), [1, 2, 5])
        self.assertEqual(fractions.tolist(), [1.0, 0.5, 0.25])

    def test_empty_population(self):
        values, fractions = ccdf_points(np.array([], dtype=np.int64))
        self.assertEqual(values.size, 0)
        self.assertEqual(fractions.size, 0)

    def test_in_degree_of_out_tendrils(self):
        d, c = canon_dataset()
        curve = ccdf(d, c, 'in_degree', 'OUT_TENDRILS')
        self.assertEqual(curve.points(), [(0, 1.0), (1, 0.5)])
        filtered = ccdf(d, c, 'in_degree', L.OUT_TENDRILS, filter_zeros=True)
        self.assertEqual(filtered.points(), [(1, 1.0)])
        self.assertEqual(filtered.population, 1)

    def test_non_increasing(self):
        d, c = canon_dataset()
        for label in L:
            curve = ccdf(d, c, 'out_degree', label)
            self.assertTrue(np.all(np.diff(curve.fractions) <= 0))

    def test_unknown_component(self):
        d, c = canon_dataset()
        with self.assertRaises(ContractViolation):
            ccdf(d, c, 'in_degree', 'CORE')

    def test_unknown_metric(self):
        d, c = canon_dataset()
        with self.assertRaises(ContractViolation):
            ccdf(d, c, 'retweets', 'LSC')


class TestMonths(unittest.TestCase):
    """Test calendar month arithmetic"""

    def test_whole_months(self):
        start = np.array(['2020-01-15', '2020-01-31', '2019-12-31'], dtype='datetime64[D]')
        self.assertEqual(months_between(start, date(2020, 7, 15)).tolist(), [6, 5, 6])

    def test_short_month(self):
        start = np.array(['2020-01-31'], dtype='datetime64[D]')
        self.assertEqual(months_between(start, date(2020, 2, 29)).tolist(), [0])

    def test_age_metric(self):
        meta = {i: NodeMeta(created_at=date(2019, 1, 1)) for i in range(1, 12)}
        meta[1] = NodeMeta(created_at=date(2020, 1, 1))
        d, _ = canon_dataset(meta)
        values, known = metric_values(d, 'age_months')
        self.assertTrue(known.all())
        self.assertEqual(int(values[0]), 0)
        self.assertEqual(int(values[1]), 12)

    def test_reference_before_creation(self):
        meta = {1: NodeMeta(created_at=date(2020, 1, 1))}
        d, _ = canon_dataset(meta)
        with self.assertRaises(ContractViolation):
            metric_values(d, 'age_months', reference_date=date(2019, 1, 1))


class TestDegreeSummary(unittest.TestCase):
    """Test mean, median and 90th percentile of degree"""

    def test_canon_in_degree(self):
        d, _ = canon_dataset()
        summary = degree_summary(d, 'in')
        self.assertEqual(summary['mean'], 1.0)
        self.assertEqual(summary['median'], 1)
        self.assertEqual(summary['p90'], 2)
        self.assertEqual(summary['max'], 3)

    def test_canon_out_degree(self):
        d, _ = canon_dataset()
        summary = degree_summary(d, 'out')
        self.assertEqual(summary['mean'], 1.0)
        self.assertEqual(summary['median'], 1)
        self.assertEqual(summary['p90'], 2)

    def test_empty_graph(self):
        with self.assertRaises(EmptyGraphError):
            degree_summary(Dataset.from_graph(DirectedGraph.empty()))

    def test_bad_direction(self):
        d, _ = canon_dataset()
        with self.assertRaises(ContractViolation):
            degree_summary(d, 'both')


class TestAbandoned(unittest.TestCase):
    """Test the abandoned-account heuristic"""

    def test_degree_thresholds_only(self):
        d, c = canon_dataset()
        report = abandoned_fraction(d, c, min_age_months=0)
        self.assertEqual(report['LSC'], {'members': 2, 'abandoned': 1, 'fraction': 0.5})
        self.assertEqual(report['IN']['abandoned'], 0)
        self.assertEqual(report['OUT_TENDRILS']['fraction'], 1.0)
        self.assertEqual(report['DISCONNECTED']['fraction'], 1.0)

    def test_age_requires_dates(self):
        """Undated accounts never pass a positive age threshold"""
        d, c = canon_dataset()
        report = abandoned_fraction(d, c, min_age_months=6)
        self.assertTrue(all(row['abandoned'] == 0 for row in report.values()))

    def test_age_threshold(self):
        meta = {i: NodeMeta(created_at=date(2019, 1, 1)) for i in range(1, 12)}
        meta[10] = NodeMeta(created_at=date(2019, 12, 1))
        d, c = canon_dataset(meta)
        report = abandoned_fraction(d, c, min_age_months=6, reference_date=date(2020, 1, 1))
        self.assertEqual(report['DISCONNECTED']['abandoned'], 1)
        self.assertEqual(report['LSC']['abandoned'], 1)

    def test_require_no_tweet(self):
        meta = {i: NodeMeta(tweet_count=1) for i in range(1, 12)}
        d, c = canon_dataset(meta)
        report = abandoned_fraction(d, c, min_age_months=0, require_no_tweet=True)
        self.assertTrue(all(row['abandoned'] == 0 for row in report.values()))

    def test_negative_threshold(self):
        d, c = canon_dataset()
        with self.assertRaises(ContractViolation):
            abandoned_fraction(d, c, max_followers=-1)


class TestOutliers(unittest.TestCase):
    """Test top-k outlier reports"""

    def setUp(self):
        self.d, self.c = canon_dataset()

    def test_top_followed(self):
        """Ties on in-degree go to the smaller ID"""
        report = top_k_outliers(self.d, self.c, OutlierCategory.TOP_FOLLOWED, 2)
        self.assertEqual(report.member_ids, [3, 1])
        self.assertEqual(report.member_labels, [L.OUT, L.LSC])
        self.assertFalse(report.truncated)
        self.assertEqual(report.shares()['OUT'], 50.0)

    def test_truncated(self):
        report = top_k_outliers(self.d, self.c, 'top_followed', 20)
        self.assertTrue(report.truncated)
        self.assertEqual(len(report.member_ids), 11)

    def test_following_with_few_followers(self):
        report = top_k_outliers(self.d, self.c, OutlierCategory.TOP_FOLLOWING_LE1_FOLLOWER, 1)
        self.assertEqual(report.member_ids, [4])

    def test_per_component(self):
        report = top_k_outliers(self.d, self.c, OutlierCategory.TOP_FOLLOWED, 1, scope='per_component')
        self.assertEqual(report.member_ids, [1, 4, 3, 5, 6, 7, 9, 11])

    def test_label_prevalence(self):
        suspended = self.d.graph.node_ids == 3
        report = top_k_outliers(self.d, self.c, OutlierCategory.TOP_FOLLOWED, 2, label_mask=suspended)
        self.assertEqual(report.label_prevalence['OUT'], 100.0)
        self.assertEqual(report.label_prevalence['LSC'], 0.0)
        self.assertIsNone(report.label_prevalence['IN'])

    def test_bad_k(self):
        with self.assertRaises(ContractViolation):
            top_k_outliers(self.d, self.c, OutlierCategory.TOP_FOLLOWED, 0)


class TestCrosstab(unittest.TestCase):
    """Test external label cross-tabulation"""

    def test_ids_with_absent(self):
        d, c = canon_dataset()
        report = label_crosstab(d, c, [1, 3, 99], name='flagged')
        self.assertEqual(report.set_size, 3)
        self.assertEqual(report.absent, 1)
        distribution = report.distribution()
        self.assertAlmostEqual(distribution['LSC'], 33.3333)
        self.assertAlmostEqual(distribution['absent'], 33.3333)
        self.assertEqual(report.prevalence()['LSC'], 50.0)
        self.assertEqual(report.prevalence()['OUT'], 100.0)

    def test_status(self):
        meta = {5: NodeMeta(status=AccountStatus.SUSPENDED), 9: NodeMeta(status=AccountStatus.SUSPENDED)}
        d, c = canon_dataset(meta)
        report = label_crosstab(d, c, AccountStatus.SUSPENDED)
        self.assertEqual(report.set_size, 2)
        self.assertEqual(int(report.per_component[L.IN_TENDRILS]), 1)
        self.assertEqual(int(report.per_component[L.OTHER]), 1)

    def test_builtin_masks(self):
        meta = {2: NodeMeta(flags=frozenset({'verified'})), 4: NodeMeta(status=AccountStatus.SUSPENDED)}
        d, c = canon_dataset(meta)
        masks = builtin_label_masks(d)
        self.assertEqual(sorted(masks), ['expert', 'suspended', 'verified'])
        self.assertEqual(int(masks['verified'].sum()), 1)
        report = label_crosstab(d, c, masks['suspended'], name='suspended')
        self.assertEqual(int(report.per_component[L.IN]), 1)


if __name__ == '__main__':
    unittest.main()
