"""
Unit tests for synthetic graphs and the brute-force oracle
"""
import unittest
import sys
import os
from datetime import date

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from bowtie.errors import ContractViolation, InvalidSpecError
from bowtie.graph_core import build_graph
from bowtie.macrostructure import decompose
from bowtie.models.models import ComponentLabel as L
from bowtie.synth import (
    PlantSpec, canon11_graph, oracle_classify, planted_bowtie, random_digraph,
    same_classification, synthetic_metadata
)

CANON_SHAPE = {
    L.LSC: 2, L.IN: 1, L.OUT: 1, L.IN_TENDRILS: 1,
    L.OUT_TENDRILS: 2, L.BRIDGES: 1, L.OTHER: 1, L.DISCONNECTED: 2,
}


class TestRandomDigraph(unittest.TestCase):
    """Test seeded uniform digraphs"""

    def test_complete(self):
        g = random_digraph(3, 6, seed=11)
        self.assertEqual(g.arc_count, 6)
        self.assertEqual(g.out_degrees().tolist(), [2, 2, 2])

    def test_no_arcs(self):
        g = random_digraph(5, 0)
        self.assertEqual(g.node_count, 5)
        self.assertEqual(g.arc_count, 0)

    def test_deterministic(self):
        a = random_digraph(50, 200, seed=9)
        b = random_digraph(50, 200, seed=9)
        self.assertEqual(list(a.external_arcs()), list(b.external_arcs()))

    def test_seed_changes_graph(self):
        a = random_digraph(50, 200, seed=9)
        b = random_digraph(50, 200, seed=10)
        self.assertNotEqual(list(a.external_arcs()), list(b.external_arcs()))

    def test_simple(self):
        """Exactly m distinct arcs and no self-loops"""
        g = random_digraph(30, 400, seed=2)
        src, dst = g.arcs()
        self.assertEqual(g.arc_count, 400)
        self.assertFalse(np.any(src == dst))

    def test_infeasible(self):
        with self.assertRaises(ContractViolation):
            random_digraph(3, 7)


class TestPlantSpec(unittest.TestCase):
    """Test plant validation"""

    def test_valid(self):
        self.assertEqual(PlantSpec(sizes=dict(CANON_SHAPE)).validate(), [])

    def test_tendrils_need_anchor(self):
        errors = PlantSpec(sizes={L.LSC: 3, L.IN_TENDRILS: 2}).validate()
        self.assertTrue(any('IN_TENDRILS' in e for e in errors))

    def test_small_lsc(self):
        errors = PlantSpec(sizes={L.LSC: 1, L.OUT: 1}).validate()
        self.assertTrue(any('>= 2' in e for e in errors))

    def test_negative_size(self):
        errors = PlantSpec(sizes={L.LSC: -1}).validate()
        self.assertEqual(errors, ['LSC size must be >= 0'])

    def test_too_many_extra_arcs(self):
        errors = PlantSpec(sizes={L.LSC: 3}, lsc_extra_arcs=4).validate()
        self.assertEqual(len(errors), 1)

    def test_invalid_spec_raises(self):
        with self.assertRaises(InvalidSpecError):
            planted_bowtie(PlantSpec(sizes={L.BRIDGES: 1}))


class TestPlantedBowtie(unittest.TestCase):
    """Test planted graphs classify to their plant"""

    def test_canon_shape(self):
        spec = PlantSpec(sizes=dict(CANON_SHAPE), depth={L.OUT_TENDRILS: 2}, seed=1)
        g, expected = planted_bowtie(spec)
        c, _ = decompose(g)
        self.assertTrue(same_classification(c, expected))
        self.assertEqual(int(expected.level[expected.labels == L.OUT_TENDRILS].max()), 2)

    def test_lsc_only(self):
        g, expected = planted_bowtie(PlantSpec(sizes={L.LSC: 6}))
        self.assertEqual(g.arc_count, 6)
        self.assertTrue(np.all(expected.labels == L.LSC))

    def test_lsc_and_isolated(self):
        g, expected = planted_bowtie(PlantSpec(sizes={L.LSC: 3, L.DISCONNECTED: 4}))
        self.assertEqual(g.node_count, 7)
        self.assertEqual(g.arc_count, 3)
        c, _ = decompose(g)
        self.assertTrue(same_classification(c, expected))

    def test_extra_lsc_arcs(self):
        g, _ = planted_bowtie(PlantSpec(sizes={L.LSC: 10}, lsc_extra_arcs=25, seed=5))
        self.assertEqual(g.arc_count, 35)

    def test_empty(self):
        g, expected = planted_bowtie(PlantSpec())
        self.assertEqual(g.node_count, 0)
        self.assertTrue(expected.is_empty)

    def test_deep_levels(self):
        spec = PlantSpec(
            sizes={L.LSC: 20, L.IN: 30, L.OUT: 40, L.IN_TENDRILS: 10, L.OUT_TENDRILS: 10,
                   L.BRIDGES: 5, L.OTHER: 5, L.DISCONNECTED: 5},
            lsc_extra_arcs=40,
            depth={L.IN: 3, L.OUT: 4, L.IN_TENDRILS: 2, L.OUT_TENDRILS: 2},
            seed=3,
        )
        g, expected = planted_bowtie(spec)
        c, _ = decompose(g, method='tarjan')
        self.assertTrue(same_classification(c, expected))
        self.assertEqual(int(c.level[c.labels == L.OUT].max()), 4)

    def test_ten_thousand_nodes(self):
        """A 10k-node plant is recovered exactly by the production pipeline"""
        spec = PlantSpec(
            sizes={L.LSC: 4000, L.IN: 1500, L.OUT: 2500, L.IN_TENDRILS: 500, L.OUT_TENDRILS: 700,
                   L.BRIDGES: 200, L.OTHER: 300, L.DISCONNECTED: 300},
            lsc_extra_arcs=20_000,
            depth={L.IN: 5, L.OUT: 6, L.IN_TENDRILS: 3, L.OUT_TENDRILS: 3},
            seed=42,
        )
        g, expected = planted_bowtie(spec, verify=False)
        self.assertEqual(g.node_count, 10_000)
        c, summary = decompose(g)
        self.assertTrue(same_classification(c, expected))
        self.assertEqual(int(summary.sizes[L.LSC]), 4000)


class TestOracle(unittest.TestCase):
    """Test the brute-force classifier and differential agreement"""

    def test_canon(self):
        c = oracle_classify(canon11_graph())
        labels = {int(i): L(int(l)) for i, l in zip(c.node_ids, c.labels)}
        self.assertEqual(labels[7], L.BRIDGES)
        self.assertEqual(labels[8], L.OUT_TENDRILS)
        self.assertEqual(labels[9], L.OTHER)
        self.assertEqual(int(c.level[c.node_ids == 8][0]), 2)

    def test_cycle(self):
        c = oracle_classify(build_graph([(1, 2), (2, 3), (3, 4), (4, 1)]))
        self.assertTrue(np.all(c.labels == L.LSC))

    def test_two_isolated(self):
        c = oracle_classify(build_graph([], nodes=[1, 2]))
        self.assertEqual(c.labels.tolist(), [L.LSC, L.DISCONNECTED])

    def test_refuses_large_graphs(self):
        with self.assertRaises(ContractViolation):
            oracle_classify(random_digraph(30, 10), max_n=20)

    def test_differential(self):
        """Production classification equals the oracle on 1000 seeded digraphs"""
        rng = np.random.default_rng(2024)
        densities = (0.5, 1, 2, 4)
        for trial in range(1000):
            n = int(rng.integers(2, 201))
            m = min(int(round(densities[trial % 4] * n)), n * (n - 1))
            g = random_digraph(n, m, seed=trial)
            c, _ = decompose(g, method='tarjan' if trial % 2 else 'scipy')
            self.assertTrue(same_classification(c, oracle_classify(g)), f"trial {trial} (n={n}, m={m})")


class TestSyntheticMetadata(unittest.TestCase):
    """Test generated metadata"""

    def test_consistent_with_graph(self):
        g = canon11_graph()
        meta = synthetic_metadata(g, seed=4, start=date(2010, 1, 1), end=date(2015, 1, 1))
        self.assertEqual(sorted(meta), list(range(1, 12)))
        for node_id, record in meta.items():
            n = g.index_of(node_id)
            self.assertEqual(record.api_followers, g.degree(n, 'in'))
            self.assertEqual(record.api_followings, g.degree(n, 'out'))
            self.assertTrue(date(2010, 1, 1) <= record.created_at <= date(2015, 1, 1))
            if record.last_tweet_at is not None:
                self.assertTrue(record.created_at <= record.last_tweet_at <= date(2015, 1, 1))

    def test_deterministic(self):
        g = canon11_graph()
        self.assertEqual(synthetic_metadata(g, seed=1), synthetic_metadata(g, seed=1))


if __name__ == '__main__':
    unittest.main()
