"""
Unit tests for the directed graph core
"""
import unittest
import sys
import os

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from bowtie.errors import ContractViolation
from bowtie.graph_core import (
    MAX_EXTERNAL_ID, DirectedGraph, bfs_levels, build_graph, degree, induced_subgraph
)
from bowtie.synth import CANON_11_ARCS, canon11_graph, random_digraph


class TestBuildGraph(unittest.TestCase):
    """Test graph construction from arc streams"""

    def test_canon_sizes(self):
        """The eleven-node example has 11 nodes and 11 arcs"""
        g = canon11_graph()
        self.assertEqual(g.node_count, 11)
        self.assertEqual(g.arc_count, 11)
        self.assertEqual(g.node_ids.tolist(), list(range(1, 12)))

    def test_duplicates_and_self_loops_dropped(self):
        """Duplicate arcs and self-loops are removed and counted"""
        g = build_graph([(5, 6), (5, 6), (6, 6), (6, 5)])
        self.assertEqual(g.node_count, 2)
        self.assertEqual(g.arc_count, 2)
        self.assertEqual(g.dropped_duplicates, 1)
        self.assertEqual(g.dropped_self_loops, 1)

    def test_self_loop_only(self):
        """A lone self-loop leaves one node and no arcs"""
        g = build_graph([(7, 7)])
        self.assertEqual(g.node_count, 1)
        self.assertEqual(g.arc_count, 0)

    def test_empty(self):
        g = build_graph([])
        self.assertEqual(g.node_count, 0)
        self.assertEqual(g.arc_count, 0)

    def test_order_independent(self):
        """Any ordering of the same arcs builds the same graph"""
        a = build_graph(CANON_11_ARCS)
        b = build_graph(list(reversed(CANON_11_ARCS)), chunk_arcs=3)
        np.testing.assert_array_equal(a.node_ids, b.node_ids)
        np.testing.assert_array_equal(a.out_offsets, b.out_offsets)
        np.testing.assert_array_equal(a.out_targets, b.out_targets)
        np.testing.assert_array_equal(a.in_sources, b.in_sources)

    def test_extreme_ids(self):
        """IDs span the full unsigned 64-bit range"""
        g = build_graph([(MAX_EXTERNAL_ID, 0)])
        self.assertEqual(g.node_ids.tolist(), [0, MAX_EXTERNAL_ID])
        self.assertEqual(g.index_of(MAX_EXTERNAL_ID), 1)
        self.assertEqual(list(g.external_arcs()), [(MAX_EXTERNAL_ID, 0)])

    def test_node_declarations(self):
        """Pairs without a target and extra node IDs become isolated nodes"""
        g = build_graph([(5, None), (1, 2)], nodes=[9])
        self.assertEqual(g.node_ids.tolist(), [1, 2, 5, 9])
        self.assertEqual(g.arc_count, 1)

    def test_views_agree(self):
        """Forward and reverse adjacency hold the same arc set"""
        g = canon11_graph()
        src, dst = g.arcs()
        rsrc, rdst = g.reverse_arcs()
        forward = set(zip(src.tolist(), dst.tolist()))
        reverse = set(zip(rsrc.tolist(), rdst.tolist()))
        self.assertEqual(forward, reverse)
        self.assertEqual(int(g.in_degrees().sum()), g.arc_count)
        self.assertEqual(int(g.out_degrees().sum()), g.arc_count)

    def test_to_csr(self):
        g = canon11_graph()
        matrix = g.to_csr()
        self.assertEqual(matrix.shape, (11, 11))
        self.assertEqual(matrix.nnz, 11)
        self.assertEqual(matrix[g.index_of(1), g.index_of(3)], 1)


class TestLookups(unittest.TestCase):
    """Test degrees and ID lookups"""

    def setUp(self):
        self.g = canon11_graph()

    def test_degrees(self):
        """Node 4 follows three accounts; node 3 has three followers"""
        self.assertEqual(self.g.degree(self.g.index_of(4), 'out'), 3)
        self.assertEqual(degree(self.g, self.g.index_of(3), 'in'), 3)
        self.assertEqual(self.g.degree(self.g.index_of(11), 'out'), 0)

    def test_in_degree_vector(self):
        self.assertEqual(self.g.in_degrees().tolist(), [2, 1, 3, 0, 2, 1, 1, 0, 0, 0, 1])

    def test_bad_direction(self):
        with self.assertRaises(ContractViolation):
            self.g.degree(0, 'sideways')

    def test_out_of_range_index(self):
        with self.assertRaises(ContractViolation):
            self.g.degree(11, 'in')
        with self.assertRaises(ContractViolation):
            self.g.external_id(-1)

    def test_unknown_id(self):
        with self.assertRaises(KeyError):
            self.g.index_of(12)
        with self.assertRaises(KeyError):
            self.g.index_of_many(np.array([1, 12], dtype=np.uint64))

    def test_contains(self):
        mask = self.g.contains(np.array([0, 1, 11, 12], dtype=np.uint64))
        self.assertEqual(mask.tolist(), [False, True, True, False])

    def test_neighbors(self):
        four = self.g.index_of(4)
        targets = [self.g.external_id(int(n)) for n in self.g.out_neighbors(four)]
        self.assertEqual(targets, [1, 5, 7])
        three = self.g.index_of(3)
        sources = [self.g.external_id(int(n)) for n in self.g.in_neighbors(three)]
        self.assertEqual(sources, [1, 6, 7])


class TestInducedSubgraph(unittest.TestCase):
    """Test node removal"""

    def test_keep_first_four(self):
        """Keeping nodes 1-4 leaves the arcs 1-2, 2-1, 1-3, 4-1"""
        g = canon11_graph()
        keep = np.isin(g.node_ids, np.array([1, 2, 3, 4], dtype=np.uint64))
        sub = induced_subgraph(g, keep)
        self.assertEqual(sub.node_ids.tolist(), [1, 2, 3, 4])
        self.assertEqual(sub.arc_count, 4)
        self.assertEqual(set(sub.external_arcs()), {(1, 2), (2, 1), (1, 3), (4, 1)})

    def test_predicate(self):
        g = canon11_graph()
        sub = g.induced_subgraph(lambda n: g.external_id(n) >= 10)
        self.assertEqual(sub.node_ids.tolist(), [10, 11])
        self.assertEqual(sub.arc_count, 1)

    def test_keep_everything(self):
        """An always-true predicate keeps every node's degrees"""
        for g in (canon11_graph(), random_digraph(200, 700, seed=9)):
            sub = induced_subgraph(g, lambda n: True)
            self.assertEqual(sub.node_ids.tolist(), g.node_ids.tolist())
            self.assertEqual(sub.arc_count, g.arc_count)
            for external in g.node_ids.tolist():
                before, after = g.index_of(external), sub.index_of(external)
                self.assertEqual(degree(sub, after, 'in'), degree(g, before, 'in'))
                self.assertEqual(degree(sub, after, 'out'), degree(g, before, 'out'))

    def test_keep_nothing(self):
        g = canon11_graph()
        sub = g.induced_subgraph(np.zeros(11, dtype=bool))
        self.assertEqual(sub.node_count, 0)
        self.assertEqual(sub.arc_count, 0)

    def test_wrong_mask_shape(self):
        with self.assertRaises(ContractViolation):
            canon11_graph().induced_subgraph(np.ones(3, dtype=bool))


class TestBfsLevels(unittest.TestCase):
    """Test frontier BFS"""

    def test_forward_from_four(self):
        g = canon11_graph()
        dist = bfs_levels(g, [g.index_of(4)])
        by_id = {g.external_id(n): int(dist[n]) for n in range(g.node_count)}
        self.assertEqual(by_id[4], 0)
        self.assertEqual(by_id[1], 1)
        self.assertEqual(by_id[7], 1)
        self.assertEqual(by_id[3], 2)
        self.assertEqual(by_id[2], 2)
        self.assertEqual(by_id[6], -1)

    def test_reverse_with_allowed(self):
        """Reverse search into node 3 that may not enter the LSC"""
        g = canon11_graph()
        allowed = ~np.isin(g.node_ids, np.array([1, 2], dtype=np.uint64))
        dist = bfs_levels(g, [g.index_of(3)], reverse=True, allowed=allowed)
        self.assertEqual(int(dist[g.index_of(8)]), 2)
        self.assertEqual(int(dist[g.index_of(4)]), 2)
        self.assertEqual(int(dist[g.index_of(1)]), -1)

    def test_long_path(self):
        """Deep chains need no recursion"""
        n = 50_000
        src = np.arange(n - 1)
        g = DirectedGraph.from_index_arcs(np.arange(n, dtype=np.uint64), src, src + 1)
        dist = bfs_levels(g, [0])
        self.assertEqual(int(dist[-1]), n - 1)


if __name__ == '__main__':
    unittest.main()
