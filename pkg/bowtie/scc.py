"""
Strongly connected components and the condensation DAG

Two backends compute the same partition:
- 'tarjan': iterative Tarjan with an explicit frame stack (no recursion)
- 'scipy': scipy.sparse.csgraph strong components (compiled, used at scale)
Component IDs are canonical: ordered by their minimum member NodeIndex.
"""
import logging
from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.sparse.csgraph import connected_components

from bowtie.errors import ContractViolation, ResourceExhaustedError
from bowtie.graph_core import DirectedGraph

logger = logging.getLogger(__name__)

SCC_METHODS = ('scipy', 'tarjan')


@dataclass(frozen=True)
class SccPartition:
    """SCC membership per node"""
    component_of: np.ndarray
    component_sizes: np.ndarray

    @property
    def component_count(self) -> int:
        return int(self.component_sizes.size)

    @property
    def node_count(self) -> int:
        return int(self.component_of.size)


@dataclass(frozen=True)
class CondensedDag:
    """
    Acyclic super-graph: one super-node per SCC

    `graph` holds the weighted arcs as a DirectedGraph over component IDs;
    `weights` is aligned with its forward adjacency order.
    """
    graph: DirectedGraph
    weights: np.ndarray
    node_sizes: np.ndarray
    intra_arc_count: int

    @property
    def node_count(self) -> int:
        return self.graph.node_count

    @property
    def arc_count(self) -> int:
        return self.graph.arc_count

    def total_weight(self) -> int:
        return int(self.weights.sum())

    def weighted_arcs(self) -> List[tuple]:
        """(component, component, weight) triples in forward order"""
        src, dst = self.graph.arcs()
        return list(zip(src.tolist(), dst.tolist(), self.weights.tolist()))


def canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Renumber component labels so IDs follow the minimum member index"""
    if labels.size == 0:
        return labels.astype(np.int64)
    uniq, first = np.unique(labels, return_index=True)
    order = np.argsort(first, kind='stable')
    remap = np.empty(uniq.size, dtype=np.int64)
    remap[order] = np.arange(uniq.size, dtype=np.int64)
    return remap[np.searchsorted(uniq, labels)]


def _tarjan_labels(g: DirectedGraph) -> np.ndarray:
    """Iterative Tarjan; component numbers in order of completion"""
    n = g.node_count
    offsets = g.out_offsets.tolist()
    targets = g.out_targets.tolist()

    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    component = [-1] * n
    stack = []
    counter = 0
    found = 0

    for root in range(n):
        if index[root] != -1:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        frame_node = [root]
        frame_pos = [offsets[root]]

        while frame_node:
            v = frame_node[-1]
            pos = frame_pos[-1]
            end = offsets[v + 1]
            descended = False
            while pos < end:
                w = targets[pos]
                pos += 1
                if index[w] == -1:
                    frame_pos[-1] = pos
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    frame_node.append(w)
                    frame_pos.append(offsets[w])
                    descended = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if descended:
                continue

            frame_node.pop()
            frame_pos.pop()
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    component[w] = found
                    if w == v:
                        break
                found += 1
            if frame_node:
                parent = frame_node[-1]
                if low[v] < low[parent]:
                    low[parent] = low[v]

    return np.array(component, dtype=np.int64)


def _scipy_labels(g: DirectedGraph) -> np.ndarray:
    _, labels = connected_components(g.to_csr(), directed=True, connection='strong', return_labels=True)
    return labels


def compute_scc(g: DirectedGraph, method: str = 'scipy') -> SccPartition:
    """
    Compute the exact SCC partition of a graph

    Args:
        g: Any directed graph, including the empty one
        method: 'scipy' or 'tarjan'; both yield the identical partition

    Returns:
        SccPartition with canonical component numbering
    """
    if method not in SCC_METHODS:
        raise ContractViolation(f"Unknown SCC method '{method}'. Choose: {', '.join(SCC_METHODS)}")

    if g.node_count == 0:
        empty = np.empty(0, dtype=np.int64)
        return SccPartition(component_of=empty, component_sizes=empty.copy())

    try:
        raw = _tarjan_labels(g) if method == 'tarjan' else _scipy_labels(g)
        component_of = canonical_labels(raw)
    except MemoryError:
        raise ResourceExhaustedError('scc')

    sizes = np.bincount(component_of)
    logger.info("found %d SCCs (largest %d nodes) via %s", sizes.size, int(sizes.max()), method)
    return SccPartition(component_of=component_of, component_sizes=sizes)


def condense(g: DirectedGraph, p: SccPartition) -> CondensedDag:
    """
    Contract every SCC to a super-node

    Parallel arcs between two SCCs become one arc weighted by their number.

    Args:
        g: The graph the partition was computed from
        p: Its SCC partition

    Returns:
        CondensedDag whose weights plus intra-SCC arcs equal g's arc count
    """
    if p.node_count != g.node_count:
        raise ContractViolation(
            f"partition covers {p.node_count} nodes but graph has {g.node_count}")

    c = p.component_count
    try:
        src, dst = g.arcs()
        comp_src = p.component_of[src]
        comp_dst = p.component_of[dst]
        inter = comp_src != comp_dst
        intra = int(inter.size - inter.sum())
        codes, weights = np.unique(comp_src[inter] * np.int64(c) + comp_dst[inter], return_counts=True)
    except MemoryError:
        raise ResourceExhaustedError('condense')

    super_ids = np.arange(c, dtype=np.uint64)
    if c:
        dag_graph = DirectedGraph.from_index_arcs(super_ids, codes // c, codes % c)
    else:
        dag_graph = DirectedGraph.empty()

    dag = CondensedDag(graph=dag_graph, weights=weights.astype(np.int64),
                       node_sizes=p.component_sizes, intra_arc_count=intra)
    if dag.total_weight() + intra != g.arc_count:
        raise ContractViolation("condensation lost arcs")
    logger.debug("condensed to %d super-nodes, %d weighted arcs, %d intra-SCC arcs",
                 dag.node_count, dag.arc_count, intra)
    return dag


def topological_order(dag: CondensedDag) -> np.ndarray:
    """
    Kahn's algorithm, one frontier at a time

    Raises:
        ContractViolation: the super-graph has a cycle
    """
    g = dag.graph
    remaining = g.in_degrees().copy()
    frontier = np.flatnonzero(remaining == 0)
    order = []
    while frontier.size:
        order.append(frontier)
        targets = g.gather_out(frontier)
        np.subtract.at(remaining, targets, 1)
        touched = np.unique(targets)
        frontier = touched[remaining[touched] == 0]
    result = np.concatenate(order) if order else np.empty(0, dtype=np.int64)
    if result.size != g.node_count:
        raise ContractViolation("condensation is not acyclic")
    return result
