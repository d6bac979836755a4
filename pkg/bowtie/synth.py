"""
Synthetic graphs
Seeded random digraphs, planted bow-ties with known labels, and a
brute-force reachability oracle for differential testing.

Generator contract: every random draw comes from numpy's PCG64
`default_rng(seed)`, so a (parameters, seed) pair gives the same graph on
every platform.

Random digraph: sample m distinct codes from [0, n(n-1)) without
replacement; code k is the arc u -> v with u = k // (n-1), r = k % (n-1),
v = r if r < u else r + 1.
"""
import logging
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Dict, List, Tuple

import networkx as nx
import numpy as np

from bowtie.errors import ContractViolation, InvalidSpecError
from bowtie.graph_core import DirectedGraph, build_graph
from bowtie.macrostructure import NO_LEVEL, Classification
from bowtie.models.models import ComponentLabel, AccountStatus, NodeMeta

logger = logging.getLogger(__name__)

L = ComponentLabel

ORACLE_MAX_N = 5000

# Eleven-node fixture covering all eight components
CANON_11_ARCS = (
    (1, 2), (2, 1), (1, 3), (4, 1), (4, 5), (4, 7),
    (7, 3), (6, 3), (8, 6), (9, 5), (10, 11),
)


def canon11_graph() -> DirectedGraph:
    return build_graph(CANON_11_ARCS)


def _pair_codes_to_arcs(codes: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Map codes in [0, n(n-1)) to ordered pairs without self-loops"""
    u = codes // (n - 1)
    r = codes % (n - 1)
    v = np.where(r < u, r, r + 1)
    return u, v


def random_digraph(n: int, m: int, seed: int = 0) -> DirectedGraph:
    """
    Uniform simple digraph with exactly m arcs over external IDs 0..n-1

    Raises:
        ContractViolation: m is negative or above n(n-1)
    """
    capacity = n * (n - 1)
    if n < 0 or m < 0 or m > capacity:
        raise ContractViolation(f"cannot place {m} arcs on {n} nodes (max {max(capacity, 0)})")

    node_ids = np.arange(n, dtype=np.uint64)
    if m == 0:
        none = np.empty(0, dtype=np.int64)
        return DirectedGraph.from_index_arcs(node_ids, none, none)

    rng = np.random.default_rng(seed)
    codes = rng.choice(capacity, size=m, replace=False).astype(np.int64)
    src, dst = _pair_codes_to_arcs(codes, n)
    return DirectedGraph.from_index_arcs(node_ids, src, dst)


@dataclass
class PlantSpec:
    """
    Target shape of a planted bow-tie

    Attributes:
        sizes: Node count per label (missing labels are 0)
        lsc_extra_arcs: Random arcs added inside the LSC on top of its cycle
        depth: Number of levels per directional label (default 1)
        seed: Generator seed
    """
    sizes: Dict[ComponentLabel, int] = field(default_factory=dict)
    lsc_extra_arcs: int = 0
    depth: Dict[ComponentLabel, int] = field(default_factory=dict)
    seed: int = 0

    def size(self, label: ComponentLabel) -> int:
        return int(self.sizes.get(label, 0))

    def levels(self, label: ComponentLabel) -> int:
        """Levels actually used: the requested depth capped by the block size"""
        return max(1, min(int(self.depth.get(label, 1)), self.size(label)))

    @property
    def total(self) -> int:
        return sum(self.size(label) for label in L)

    def validate(self) -> List[str]:
        """
        Validate the plant sizes, depths and extra arcs

        Returns:
            List of error messages (empty when valid)
        """
        errors = []
        for label in L:
            if self.size(label) < 0:
                errors.append(f"{label.name} size must be >= 0")
        for label, value in self.depth.items():
            if int(value) < 1:
                errors.append(f"{ComponentLabel(label).name} depth must be >= 1")
        if self.lsc_extra_arcs < 0:
            errors.append("lsc_extra_arcs must be >= 0")
        if errors:
            return errors

        lsc = self.size(L.LSC)
        anchored = sum(self.size(label) for label in L if label not in (L.LSC, L.DISCONNECTED))
        if self.total > 0 and lsc < 1:
            errors.append("LSC size must be >= 1 for a non-empty graph")
        if anchored > 0 and lsc < 2:
            errors.append("LSC size must be >= 2 when any component besides DISCONNECTED is planted")

        requirements = (
            (L.IN_TENDRILS, (L.IN,)),
            (L.OUT_TENDRILS, (L.OUT,)),
            (L.BRIDGES, (L.IN, L.OUT)),
            (L.OTHER, (L.IN_TENDRILS,)),
        )
        for label, needed in requirements:
            if self.size(label) > 0:
                for anchor in needed:
                    if self.size(anchor) == 0:
                        errors.append(f"{label.name} needs at least one {anchor.name} node")

        room = lsc * (lsc - 1) - (lsc if lsc > 1 else 0)
        if self.lsc_extra_arcs > room:
            errors.append(f"lsc_extra_arcs {self.lsc_extra_arcs} exceeds the {room} free LSC pairs")
        return errors


class _Planter:
    """Accumulates blocks and arcs for one planted graph"""

    def __init__(self, spec: PlantSpec):
        self.spec = spec
        self.rng = np.random.default_rng(spec.seed)
        self.n = spec.total
        self.labels = np.full(self.n, -1, dtype=np.int8)
        self.level = np.full(self.n, NO_LEVEL, dtype=np.int64)
        self.level2 = np.full(self.n, NO_LEVEL, dtype=np.int64)
        self.blocks: Dict[ComponentLabel, np.ndarray] = {}
        self.src: List[np.ndarray] = []
        self.dst: List[np.ndarray] = []

        start = 0
        for label in L:
            size = spec.size(label)
            block = np.arange(start, start + size, dtype=np.int64)
            self.blocks[label] = block
            self.labels[block] = label
            start += size

    def add(self, src, dst):
        self.src.append(np.asarray(src, dtype=np.int64))
        self.dst.append(np.asarray(dst, dtype=np.int64))

    def pick(self, pool: np.ndarray, count: int) -> np.ndarray:
        return pool[self.rng.integers(0, pool.size, size=count)]

    def plant_lsc(self):
        block = self.blocks[L.LSC]
        k = block.size
        if k < 2:
            return
        self.add(block, np.roll(block, -1))
        extra = self.spec.lsc_extra_arcs
        if extra == 0:
            return
        capacity = k * (k - 1)
        codes = self.rng.choice(capacity, size=min(extra + k, capacity), replace=False).astype(np.int64)
        u, v = _pair_codes_to_arcs(codes, k)
        off_cycle = v != (u + 1) % k
        u, v = u[off_cycle][:extra], v[off_cycle][:extra]
        self.add(block[u], block[v])

    def plant_chain(self, label: ComponentLabel, anchor: np.ndarray, outward: bool):
        """
        Spread a block over levels 1..depth; each node gets one arc tying it
        to a random node one level closer to the anchor
        """
        block = self.blocks[label]
        if block.size == 0:
            return
        depth = self.spec.levels(label)
        node_level = np.arange(block.size) % depth + 1
        self.level[block] = node_level
        for lvl in range(1, depth + 1):
            members = block[node_level == lvl]
            previous = anchor if lvl == 1 else block[node_level == lvl - 1]
            partners = self.pick(previous, members.size)
            if outward:
                self.add(partners, members)
            else:
                self.add(members, partners)

    def plant_bridges(self):
        block = self.blocks[L.BRIDGES]
        if block.size == 0:
            return
        self.add(self.pick(self.blocks[L.IN], block.size), block)
        self.add(block, self.pick(self.blocks[L.OUT], block.size))
        self.level[block] = 1
        self.level2[block] = 1

    def plant_other(self):
        block = self.blocks[L.OTHER]
        if block.size:
            self.add(block, self.pick(self.blocks[L.IN_TENDRILS], block.size))

    def build(self) -> Tuple[DirectedGraph, Classification]:
        self.plant_lsc()
        lsc = self.blocks[L.LSC]
        self.plant_chain(L.OUT, lsc, outward=True)
        self.plant_chain(L.IN, lsc, outward=False)
        self.plant_chain(L.IN_TENDRILS, self.blocks[L.IN], outward=True)
        self.plant_chain(L.OUT_TENDRILS, self.blocks[L.OUT], outward=False)
        self.plant_bridges()
        self.plant_other()
        # DISCONNECTED nodes stay isolated

        node_ids = np.arange(1, self.n + 1, dtype=np.uint64)
        src = np.concatenate(self.src) if self.src else np.empty(0, dtype=np.int64)
        dst = np.concatenate(self.dst) if self.dst else np.empty(0, dtype=np.int64)
        graph = DirectedGraph.from_index_arcs(node_ids, src, dst)
        if graph.node_count == 0:
            return graph, Classification.empty()
        expected = Classification(
            node_ids=graph.node_ids,
            labels=self.labels,
            level=self.level,
            level2=self.level2,
            lsc_component=0,
        )
        return graph, expected


def same_classification(a: Classification, b: Classification) -> bool:
    """Labels and both level columns agree node by node"""
    return (np.array_equal(a.node_ids, b.node_ids)
            and np.array_equal(a.labels, b.labels)
            and np.array_equal(a.level, b.level)
            and np.array_equal(a.level2, b.level2))


def planted_bowtie(spec: PlantSpec, verify: bool = True,
                   max_n: int = ORACLE_MAX_N) -> Tuple[DirectedGraph, Classification]:
    """
    Build a graph whose macrostructure is known by construction

    Blocks are laid out in label order with external IDs 1..N, so the LSC
    holds the smallest indices. Outside the LSC every arc points one level
    further from its anchor, which keeps that part acyclic.

    Args:
        spec: Target shape
        verify: Cross-check the plant with oracle_classify when N <= max_n
        max_n: Oracle size limit

    Returns:
        (graph, expected classification)

    Raises:
        InvalidSpecError: spec.validate() reported errors
        ContractViolation: the oracle disagrees with the plant
    """
    errors = spec.validate()
    if errors:
        raise InvalidSpecError(errors)

    graph, expected = _Planter(spec).build()
    logger.info("planted bow-tie N=%d M=%d (seed %d)", graph.node_count, graph.arc_count, spec.seed)

    if verify and graph.node_count <= max_n:
        if not same_classification(oracle_classify(graph, max_n=max_n), expected):
            raise ContractViolation("planted graph does not classify to its plant")
    return graph, expected


def oracle_classify(g: DirectedGraph, max_n: int = ORACLE_MAX_N) -> Classification:
    """
    Classify by brute force over networkx reachability

    Shares no traversal or SCC code with the production pipeline.

    Raises:
        ContractViolation: g has more than max_n nodes
    """
    n = g.node_count
    if n > max_n:
        raise ContractViolation(f"oracle refuses graphs above {max_n} nodes (got {n})")
    if n == 0:
        return Classification.empty()

    nxg = nx.DiGraph()
    nxg.add_nodes_from(range(n))
    nxg.add_edges_from((int(u), int(v)) for u in range(n) for v in g.out_neighbors(u))

    # mutual reachability classes, numbered by smallest member
    component = [-1] * n
    sizes = []
    for v in range(n):
        if component[v] != -1:
            continue
        members = (nx.descendants(nxg, v) & nx.ancestors(nxg, v)) | {v}
        for u in members:
            component[u] = len(sizes)
        sizes.append(len(members))

    dag = nx.DiGraph()
    dag.add_nodes_from(range(len(sizes)))
    dag.add_edges_from((component[u], component[v]) for u, v in nxg.edges if component[u] != component[v])
    reverse_dag = dag.reverse(copy=True)

    lsc = max(range(len(sizes)), key=lambda k: (sizes[k], -k))
    out_dist = nx.single_source_shortest_path_length(dag, lsc)
    in_dist = nx.single_source_shortest_path_length(reverse_dag, lsc)
    out_set = set(out_dist) - {lsc}
    in_set = set(in_dist) - {lsc}

    from_in = nx.multi_source_dijkstra_path_length(dag, in_set) if in_set else {}
    to_out = nx.multi_source_dijkstra_path_length(reverse_dag, out_set) if out_set else {}
    weak = nx.node_connected_component(dag.to_undirected(), lsc)

    label = {}
    level = {}
    level2 = {}
    for k in range(len(sizes)):
        if k == lsc:
            label[k] = L.LSC
        elif k in out_set:
            label[k], level[k] = L.OUT, out_dist[k]
        elif k in in_set:
            label[k], level[k] = L.IN, in_dist[k]
        elif k in from_in and k in to_out:
            label[k], level[k], level2[k] = L.BRIDGES, from_in[k], to_out[k]
        elif k in from_in:
            label[k], level[k] = L.IN_TENDRILS, from_in[k]
        elif k in to_out:
            label[k], level[k] = L.OUT_TENDRILS, to_out[k]
        elif k in weak:
            label[k] = L.OTHER
        else:
            label[k] = L.DISCONNECTED

    return Classification(
        node_ids=g.node_ids,
        labels=np.array([label[component[v]] for v in range(n)], dtype=np.int8),
        level=np.array([level.get(component[v], NO_LEVEL) for v in range(n)], dtype=np.int64),
        level2=np.array([level2.get(component[v], NO_LEVEL) for v in range(n)], dtype=np.int64),
        lsc_component=lsc,
    )


def synthetic_metadata(g: DirectedGraph, seed: int = 0, start: date = date(2008, 1, 1),
                       end: date = date(2020, 12, 31)) -> Dict[int, NodeMeta]:
    """
    Metadata consistent with g: API degrees equal graph degrees

    Creation dates are uniform in [start, end]; last-tweet dates fall
    between creation and end.
    """
    rng = np.random.default_rng(seed)
    n = g.node_count
    span = (end - start).days
    created = rng.integers(0, span + 1, size=n)
    last = created + (rng.random(n) * (span - created + 1)).astype(np.int64)
    tweets = rng.integers(0, 1000, size=n)
    followers = g.in_degrees()
    followings = g.out_degrees()

    table = {}
    for i, node_id in enumerate(g.node_ids.tolist()):
        table[node_id] = NodeMeta(
            created_at=start + timedelta(days=int(created[i])),
            tweet_count=int(tweets[i]),
            api_followers=int(followers[i]),
            api_followings=int(followings[i]),
            status=AccountStatus.ACTIVE,
            last_tweet_at=start + timedelta(days=int(last[i])) if tweets[i] else None,
        )
    return table
