"""
Macrostructure
Classify every node into the eight bow-tie components with levels, and
count the arcs flowing between components.

Procedure on the condensation:
1. LSC = SCC with the most original nodes (ties: smallest member index)
2. OUT = forward BFS from LSC, IN = reverse BFS to LSC (levels = hops)
3. forward BFS from IN and reverse BFS from OUT over the remaining nodes;
   reached by both -> BRIDGES, by one -> IN_TENDRILS / OUT_TENDRILS
4. leftovers weakly connected to the LSC -> OTHER, the rest -> DISCONNECTED
"""
import csv
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.sparse.csgraph import connected_components

from bowtie.errors import ContractViolation, ParseError, ResourceExhaustedError
from bowtie.graph_core import MAX_EXTERNAL_ID, DirectedGraph, bfs_levels
from bowtie.models.models import LABEL_COUNT, LEVELED_LABELS, ComponentLabel
from bowtie.scc import CondensedDag, SccPartition, compute_scc, condense
from bowtie.utils import atomic_open, format_percent, read_text_lines, write_json

logger = logging.getLogger(__name__)

NO_LEVEL = -1
LABELS_HEADER = ('id', 'component', 'level', 'level2')

L = ComponentLabel

# (source label, target label) pairs that can never carry an arc
FORBIDDEN_CELLS = frozenset(
    [(L.OUT, t) for t in L if t != L.OUT]
    + [(s, L.IN) for s in L if s != L.IN]
    + [(L.DISCONNECTED, t) for t in L if t != L.DISCONNECTED]
    + [(s, L.DISCONNECTED) for s in L if s != L.DISCONNECTED]
)


@dataclass(frozen=True)
class Classification:
    """
    Per-node component label and levels

    Arrays are aligned with node indices (ascending external ID).
    `level` holds the single level of IN/OUT/tendril nodes; for BRIDGES it
    holds the distance from IN and `level2` the distance to OUT.
    """
    node_ids: np.ndarray
    labels: np.ndarray
    level: np.ndarray
    level2: np.ndarray
    lsc_component: Optional[int]

    @classmethod
    def empty(cls) -> 'Classification':
        none = np.empty(0, dtype=np.int64)
        return cls(np.empty(0, dtype=np.uint64), np.empty(0, dtype=np.int8), none, none.copy(), None)

    @property
    def is_empty(self) -> bool:
        """True for the classification of an empty graph (no LSC)"""
        return self.node_ids.size == 0

    @property
    def node_count(self) -> int:
        return int(self.node_ids.size)

    def counts(self) -> np.ndarray:
        """Node count per label, indexed by ComponentLabel"""
        return np.bincount(self.labels, minlength=LABEL_COUNT)

    def label_of(self, external_id: int) -> ComponentLabel:
        pos = int(np.searchsorted(self.node_ids, np.uint64(external_id)))
        if pos >= self.node_count or int(self.node_ids[pos]) != external_id:
            raise KeyError(external_id)
        return ComponentLabel(int(self.labels[pos]))

    def level_histogram(self) -> Dict[str, Dict[str, int]]:
        """Node count per level bin, for every leveled label and for bridge level pairs"""
        histogram = {}
        for label in LEVELED_LABELS:
            levels, counts = np.unique(self.level[self.labels == label], return_counts=True)
            histogram[label.name] = {str(int(k)): int(v) for k, v in zip(levels, counts)}
        bridges = self.labels == L.BRIDGES
        histogram[L.BRIDGES.name] = {}
        if bridges.any():
            pairs, counts = np.unique(np.stack([self.level[bridges], self.level2[bridges]], axis=1),
                                      axis=0, return_counts=True)
            histogram[L.BRIDGES.name] = {f"{int(a)},{int(b)}": int(v) for (a, b), v in zip(pairs, counts)}
        return histogram


@dataclass(frozen=True)
class MacroSummary:
    """Component sizes and the inter-component arc matrix"""
    sizes: np.ndarray
    arc_matrix: np.ndarray
    follower_sums: np.ndarray
    following_sums: np.ndarray
    total_nodes: int
    total_arcs: int
    levels: Dict[str, Dict[str, int]]

    def arcs_between(self, source: ComponentLabel, target: ComponentLabel) -> int:
        return int(self.arc_matrix[source, target])

    def arc_percentages(self) -> np.ndarray:
        """Arc matrix as percentages of all M arcs (zeros when M = 0)"""
        if self.total_arcs == 0:
            return np.zeros(self.arc_matrix.shape, dtype=np.float64)
        return 100 * self.arc_matrix / self.total_arcs

    def to_dict(self) -> dict:
        """Convert summary to the JSON layout"""
        names = [label.name for label in L]
        return {
            'labels': names,
            'sizes': {name: int(self.sizes[i]) for i, name in enumerate(names)},
            'percentages': {name: format_percent(int(self.sizes[i]), self.total_nodes)
                            for i, name in enumerate(names)},
            'arc_matrix': self.arc_matrix.astype(int).tolist(),
            'arc_percentages': [[format_percent(int(v), self.total_arcs) for v in row]
                                for row in self.arc_matrix.tolist()],
            'followers': {name: int(self.follower_sums[i]) for i, name in enumerate(names)},
            'followings': {name: int(self.following_sums[i]) for i, name in enumerate(names)},
            'levels': self.levels,
            'total_nodes': self.total_nodes,
            'total_arcs': self.total_arcs
        }


def classify(g: DirectedGraph, p: SccPartition, dag: CondensedDag) -> Classification:
    """
    Label every node of g with its macrostructure component

    Args:
        g: The graph
        p: SCC partition of g
        dag: Condensation of g under p

    Returns:
        Classification; Classification.empty() when g has no nodes
    """
    if g.node_count == 0:
        return Classification.empty()
    if p.node_count != g.node_count or dag.node_count != p.component_count:
        raise ContractViolation("partition or condensation was not computed from this graph")

    h = dag.graph
    c = h.node_count
    # argmax returns the first maximum: the tied component holding the smallest index
    lsc = int(np.argmax(dag.node_sizes))

    label = np.full(c, -1, dtype=np.int8)
    level = np.full(c, NO_LEVEL, dtype=np.int64)
    level2 = np.full(c, NO_LEVEL, dtype=np.int64)

    try:
        label[lsc] = L.LSC
        out_dist = bfs_levels(h, [lsc])
        in_dist = bfs_levels(h, [lsc], reverse=True)
        out_set = out_dist > 0
        in_set = in_dist > 0
        label[out_set] = L.OUT
        level[out_set] = out_dist[out_set]
        label[in_set] = L.IN
        level[in_set] = in_dist[in_set]

        rest = label == -1
        from_in = bfs_levels(h, np.flatnonzero(in_set), allowed=rest)
        to_out = bfs_levels(h, np.flatnonzero(out_set), reverse=True, allowed=rest)
        fwd = rest & (from_in > 0)
        bwd = rest & (to_out > 0)

        bridges = fwd & bwd
        label[bridges] = L.BRIDGES
        level[bridges] = from_in[bridges]
        level2[bridges] = to_out[bridges]
        in_tendrils = fwd & ~bwd
        label[in_tendrils] = L.IN_TENDRILS
        level[in_tendrils] = from_in[in_tendrils]
        out_tendrils = bwd & ~fwd
        label[out_tendrils] = L.OUT_TENDRILS
        level[out_tendrils] = to_out[out_tendrils]

        # every labeled super-node is weakly connected to the LSC
        _, weak = connected_components(h.to_csr(), directed=True, connection='weak')
        unlabeled = label == -1
        attached = weak == weak[lsc]
        label[unlabeled & attached] = L.OTHER
        label[unlabeled & ~attached] = L.DISCONNECTED
    except MemoryError:
        raise ResourceExhaustedError('classify')

    component_of = p.component_of
    result = Classification(
        node_ids=g.node_ids,
        labels=label[component_of],
        level=level[component_of],
        level2=level2[component_of],
        lsc_component=lsc,
    )
    logger.info("classified %d nodes: %s", g.node_count,
                ', '.join(f"{l.name}={n}" for l, n in zip(L, result.counts().tolist())))
    return result


def arc_matrix(g: DirectedGraph, c: Classification) -> MacroSummary:
    """
    Count arcs between every ordered pair of components

    Raises:
        ContractViolation: size mismatch, or an arc in a structurally forbidden cell
    """
    if c.node_count != g.node_count:
        raise ContractViolation(f"classification covers {c.node_count} nodes but graph has {g.node_count}")

    src, dst = g.arcs()
    codes = c.labels[src].astype(np.int64) * LABEL_COUNT + c.labels[dst]
    matrix = np.bincount(codes, minlength=LABEL_COUNT * LABEL_COUNT).reshape(LABEL_COUNT, LABEL_COUNT)

    for source, target in FORBIDDEN_CELLS:
        if matrix[source, target]:
            raise ContractViolation(
                f"{matrix[source, target]} arcs from {source.name} to {target.name} violate the macrostructure")

    if int(matrix.sum()) != g.arc_count:
        raise ContractViolation("arc matrix does not account for every arc")

    return MacroSummary(
        sizes=c.counts(),
        arc_matrix=matrix,
        # followers of a label = arcs entering its members = column sum
        follower_sums=matrix.sum(axis=0),
        following_sums=matrix.sum(axis=1),
        total_nodes=g.node_count,
        total_arcs=g.arc_count,
        levels=c.level_histogram(),
    )


def decompose(g: DirectedGraph, method: str = 'scipy') -> Tuple[Classification, MacroSummary]:
    """Run the full pipeline: SCC, condensation, classification, arc matrix"""
    partition = compute_scc(g, method=method)
    dag = condense(g, partition)
    classification = classify(g, partition, dag)
    return classification, arc_matrix(g, classification)


def _level_cell(value: int) -> str:
    return '' if value == NO_LEVEL else str(value)


def write_labels(c: Classification, path: str):
    """
    Write "id,component,level,level2" rows sorted by external ID

    level2 is only filled for BRIDGES.
    """
    names = [label.name for label in L]
    with atomic_open(path) as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(LABELS_HEADER)
        for node_id, label, lvl, lvl2 in zip(c.node_ids.tolist(), c.labels.tolist(),
                                            c.level.tolist(), c.level2.tolist()):
            writer.writerow((node_id, names[label], _level_cell(lvl), _level_cell(lvl2)))


def read_labels(path: str) -> Classification:
    """
    Load a labels CSV written by write_labels back into a Classification

    The LSC component ID is not recoverable from the file and is left unset.
    """
    ids, labels, levels, levels2 = [], [], [], []
    reader = csv.reader(read_text_lines(path))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != LABELS_HEADER:
        raise ParseError(f"expected header {','.join(LABELS_HEADER)}", path, 1)
    for row_number, row in enumerate(reader, start=2):
        if len(row) != len(LABELS_HEADER):
            raise ParseError(f"expected {len(LABELS_HEADER)} fields, got {len(row)}", path, row_number)
        try:
            node_id = int(row[0])
            if not 0 <= node_id <= MAX_EXTERNAL_ID:
                raise ValueError(f"id {node_id} outside the unsigned 64-bit range")
            ids.append(node_id)
            labels.append(int(ComponentLabel.parse(row[1])))
            levels.append(int(row[2]) if row[2] else NO_LEVEL)
            levels2.append(int(row[3]) if row[3] else NO_LEVEL)
        except ValueError as e:
            raise ParseError(str(e), path, row_number)

    node_ids = np.array(ids, dtype=np.uint64)
    order = np.argsort(node_ids, kind='stable')
    node_ids = node_ids[order]
    if np.unique(node_ids).size != node_ids.size:
        raise ParseError("duplicate id in labels file", path)
    return Classification(
        node_ids=node_ids,
        labels=np.array(labels, dtype=np.int8)[order],
        level=np.array(levels, dtype=np.int64)[order],
        level2=np.array(levels2, dtype=np.int64)[order],
        lsc_component=None,
    )


def write_summary(summary: MacroSummary, path: str):
    write_json(path, summary.to_dict())
