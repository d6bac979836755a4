"""
Graph Core
Immutable compressed adjacency (forward and reverse) over dense node indices

An arc (u, v) means "u follows v": u's followings are out-neighbors and
u's followers are in-neighbors.
"""
import logging
from itertools import islice
from typing import Callable, Iterable, Iterator, Optional, Tuple, Union

import numpy as np
from scipy import sparse

from bowtie.errors import ContractViolation, ResourceExhaustedError

logger = logging.getLogger(__name__)

MAX_EXTERNAL_ID = 2 ** 64 - 1
DEFAULT_CHUNK_ARCS = 1_000_000

ArcStream = Iterable[Tuple[int, Optional[int]]]


def index_dtype(count: int) -> np.dtype:
    """Narrowest signed integer type able to index `count` items"""
    return np.dtype(np.int32) if count < 2 ** 31 - 1 else np.dtype(np.int64)


def _gather(offsets: np.ndarray, targets: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    """Concatenate the adjacency slices of several nodes without a Python loop"""
    starts = offsets[nodes].astype(np.int64)
    lengths = offsets[nodes + 1].astype(np.int64) - starts
    total = int(lengths.sum())
    if total == 0:
        return np.empty(0, dtype=targets.dtype)
    # position of each output slot inside its slice
    slot_start = np.repeat(np.cumsum(lengths) - lengths, lengths)
    within = np.arange(total, dtype=np.int64) - slot_start
    return targets[np.repeat(starts, lengths) + within]


class DirectedGraph:
    """
    Compact immutable directed graph

    Node indices are dense in [0, N) and ordered by external ID, so index
    order and external-ID order agree. Both adjacency views are sorted per
    node and encode the same arc set.
    """

    def __init__(self, node_ids: np.ndarray, out_offsets: np.ndarray, out_targets: np.ndarray,
                 in_offsets: np.ndarray, in_sources: np.ndarray,
                 dropped_duplicates: int = 0, dropped_self_loops: int = 0,
                 declared_only: Optional[np.ndarray] = None):
        self.node_ids = node_ids
        self.out_offsets = out_offsets
        self.out_targets = out_targets
        self.in_offsets = in_offsets
        self.in_sources = in_sources
        self.dropped_duplicates = dropped_duplicates
        self.dropped_self_loops = dropped_self_loops
        # external IDs that came from build_graph's `nodes` and never from the arc stream
        self.declared_only = declared_only if declared_only is not None else np.empty(0, dtype=np.uint64)
        for array in (node_ids, out_offsets, out_targets, in_offsets, in_sources):
            array.setflags(write=False)

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_index_arcs(cls, node_ids: np.ndarray, src: np.ndarray, dst: np.ndarray,
                        dropped_duplicates: int = 0, dropped_self_loops: int = 0,
                        declared_only: Optional[np.ndarray] = None) -> 'DirectedGraph':
        """
        Build both adjacency views from simple arcs over dense indices

        Args:
            node_ids: Sorted external IDs, one per node
            src, dst: Arc endpoints as node indices; no self-loops or duplicates
            declared_only: External IDs known only from outside the arc input
        """
        n = int(node_ids.size)
        itype = index_dtype(n)
        src = src.astype(np.int64, copy=False)
        dst = dst.astype(np.int64, copy=False)

        # degree count, then fill in (source, target) order
        forward = np.lexsort((dst, src))
        out_offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=out_offsets[1:])
        out_targets = dst[forward].astype(itype)

        reverse = np.lexsort((src, dst))
        in_offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(dst, minlength=n), out=in_offsets[1:])
        in_sources = src[reverse].astype(itype)

        return cls(node_ids, out_offsets, out_targets, in_offsets, in_sources,
                   dropped_duplicates, dropped_self_loops, declared_only)

    @classmethod
    def empty(cls) -> 'DirectedGraph':
        none = np.empty(0, dtype=np.int64)
        return cls.from_index_arcs(np.empty(0, dtype=np.uint64), none, none)

    # ------------------------------------------------------------------
    # Size and lookups
    # ------------------------------------------------------------------

    @property
    def node_count(self) -> int:
        return int(self.node_ids.size)

    @property
    def arc_count(self) -> int:
        return int(self.out_targets.size)

    def __repr__(self) -> str:
        return f"DirectedGraph(N={self.node_count}, M={self.arc_count})"

    def index_of(self, external_id: int) -> int:
        """NodeIndex of an external ID (KeyError when absent)"""
        pos = int(np.searchsorted(self.node_ids, np.uint64(external_id)))
        if pos >= self.node_count or int(self.node_ids[pos]) != external_id:
            raise KeyError(external_id)
        return pos

    def index_of_many(self, external_ids: np.ndarray) -> np.ndarray:
        """Vectorised index_of; every ID must be present"""
        ids = np.asarray(external_ids, dtype=np.uint64)
        pos = np.searchsorted(self.node_ids, ids)
        found = pos < self.node_count
        found[found] = self.node_ids[pos[found]] == ids[found]
        if not found.all():
            raise KeyError(int(ids[~found][0]))
        return pos

    def contains(self, external_ids: np.ndarray) -> np.ndarray:
        """Boolean mask telling which external IDs are graph nodes"""
        ids = np.asarray(external_ids, dtype=np.uint64)
        if self.node_count == 0:
            return np.zeros(ids.size, dtype=bool)
        pos = np.minimum(np.searchsorted(self.node_ids, ids), self.node_count - 1)
        return self.node_ids[pos] == ids

    def external_id(self, n: int) -> int:
        self._check_index(n)
        return int(self.node_ids[n])

    def _check_index(self, n: int):
        if not 0 <= n < self.node_count:
            raise ContractViolation(f"node index {n} out of range [0, {self.node_count})")

    # ------------------------------------------------------------------
    # Degrees and neighbors
    # ------------------------------------------------------------------

    def degree(self, n: int, direction: str) -> int:
        """
        Degree of one node

        Args:
            n: NodeIndex
            direction: 'out' (followings) or 'in' (followers)
        """
        self._check_index(n)
        if direction == 'out':
            return int(self.out_offsets[n + 1] - self.out_offsets[n])
        if direction == 'in':
            return int(self.in_offsets[n + 1] - self.in_offsets[n])
        raise ContractViolation(f"direction must be 'in' or 'out', got '{direction}'")

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.out_offsets)

    def in_degrees(self) -> np.ndarray:
        return np.diff(self.in_offsets)

    def out_neighbors(self, n: int) -> np.ndarray:
        self._check_index(n)
        return self.out_targets[self.out_offsets[n]:self.out_offsets[n + 1]]

    def in_neighbors(self, n: int) -> np.ndarray:
        self._check_index(n)
        return self.in_sources[self.in_offsets[n]:self.in_offsets[n + 1]]

    def gather_out(self, nodes: np.ndarray) -> np.ndarray:
        """All out-neighbors of a node set, with repetition"""
        return _gather(self.out_offsets, self.out_targets, nodes)

    def gather_in(self, nodes: np.ndarray) -> np.ndarray:
        """All in-neighbors of a node set, with repetition"""
        return _gather(self.in_offsets, self.in_sources, nodes)

    # ------------------------------------------------------------------
    # Views
    # ------------------------------------------------------------------

    def arcs(self) -> Tuple[np.ndarray, np.ndarray]:
        """Arc list as (source index, target index) arrays in forward order"""
        src = np.repeat(np.arange(self.node_count, dtype=self.out_targets.dtype), self.out_degrees())
        return src, self.out_targets

    def reverse_arcs(self) -> Tuple[np.ndarray, np.ndarray]:
        """Arc list reconstructed from the reverse view, in (target, source) order"""
        dst = np.repeat(np.arange(self.node_count, dtype=self.in_sources.dtype), self.in_degrees())
        return self.in_sources, dst

    def external_arcs(self) -> Iterator[Tuple[int, int]]:
        """Arcs as external ID pairs"""
        src, dst = self.arcs()
        ids = self.node_ids
        for u, v in zip(ids[src].tolist(), ids[dst].tolist()):
            yield u, v

    def to_csr(self) -> sparse.csr_matrix:
        """Forward adjacency as a scipy CSR matrix (shares the index arrays)"""
        n = self.node_count
        data = np.ones(self.arc_count, dtype=np.int8)
        return sparse.csr_matrix((data, self.out_targets, self.out_offsets), shape=(n, n))

    # ------------------------------------------------------------------
    # Derived graphs
    # ------------------------------------------------------------------

    def induced_subgraph(self, keep: Union[np.ndarray, Callable[[int], bool]]) -> 'DirectedGraph':
        """
        Remove the nodes failing `keep` together with all incident arcs

        Args:
            keep: Boolean mask of length N, or a predicate over NodeIndex

        Returns:
            New graph with re-densified indices and the same external IDs
        """
        if callable(keep):
            mask = np.fromiter((bool(keep(n)) for n in range(self.node_count)), dtype=bool,
                               count=self.node_count)
        else:
            mask = np.asarray(keep, dtype=bool)
            if mask.shape != (self.node_count,):
                raise ContractViolation(f"keep mask has shape {mask.shape}, expected ({self.node_count},)")

        new_index = np.cumsum(mask) - 1
        src, dst = self.arcs()
        kept_arcs = mask[src] & mask[dst]
        return DirectedGraph.from_index_arcs(
            self.node_ids[mask].copy(),
            new_index[src[kept_arcs]],
            new_index[dst[kept_arcs]],
        )


def degree(g: DirectedGraph, n: int, direction: str) -> int:
    """Module-level alias of DirectedGraph.degree"""
    return g.degree(n, direction)


def induced_subgraph(g: DirectedGraph, keep) -> DirectedGraph:
    """Module-level alias of DirectedGraph.induced_subgraph"""
    return g.induced_subgraph(keep)


def _collect(arcs: ArcStream, chunk_arcs: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Drain the stream into endpoint arrays plus bare node declarations"""
    src_chunks, dst_chunks, node_chunks = [], [], []
    iterator = iter(arcs)
    while True:
        chunk = list(islice(iterator, chunk_arcs))
        if not chunk:
            break
        pairs = [(u, v) for u, v in chunk if v is not None]
        declared = [u for u, v in chunk if v is None]
        if pairs:
            block = np.array(pairs, dtype=np.uint64).reshape(-1, 2)
            src_chunks.append(block[:, 0])
            dst_chunks.append(block[:, 1])
        if declared:
            node_chunks.append(np.array(declared, dtype=np.uint64))

    def join(chunks):
        return np.concatenate(chunks) if chunks else np.empty(0, dtype=np.uint64)

    return join(src_chunks), join(dst_chunks), join(node_chunks)


def build_graph(arcs: ArcStream, nodes: Iterable[int] = (),
                chunk_arcs: int = DEFAULT_CHUNK_ARCS) -> DirectedGraph:
    """
    Build a DirectedGraph from a stream of external-ID arcs

    Every endpoint becomes a node. Self-loops and duplicate arcs are dropped
    and counted. A pair whose target is None declares a node without arcs.

    Args:
        arcs: Iterable of (src, dst) external IDs
        nodes: Extra external IDs to materialise as nodes; those absent from
            the arc stream are reported in `declared_only`
        chunk_arcs: Arcs buffered per conversion step

    Returns:
        The graph; identical for any ordering of the same arc multiset
    """
    try:
        src_ids, dst_ids, declared = _collect(arcs, chunk_arcs)
    except MemoryError:
        raise ResourceExhaustedError('ingest')

    extra = np.fromiter(nodes, dtype=np.uint64)
    declared_only = np.empty(0, dtype=np.uint64)
    if extra.size:
        declared_only = np.setdiff1d(extra, np.concatenate([src_ids, dst_ids, declared]))

    try:
        node_ids, inverse = np.unique(np.concatenate([src_ids, dst_ids, declared, extra]),
                                      return_inverse=True)
        m_raw = src_ids.size
        src = inverse[:m_raw].astype(np.int64)
        dst = inverse[m_raw:2 * m_raw].astype(np.int64)
    except MemoryError:
        raise ResourceExhaustedError('densify', f'{src_ids.size} arcs')

    loops = src == dst
    dropped_self_loops = int(loops.sum())
    src, dst = src[~loops], dst[~loops]

    try:
        n = np.int64(node_ids.size)
        codes = np.unique(src * n + dst)
    except MemoryError:
        raise ResourceExhaustedError('deduplicate', f'{src.size} arcs')
    dropped_duplicates = int(src.size - codes.size)

    try:
        graph = DirectedGraph.from_index_arcs(node_ids, codes // n if n else codes,
                                              codes % n if n else codes,
                                              dropped_duplicates, dropped_self_loops, declared_only)
    except MemoryError:
        raise ResourceExhaustedError('adjacency')

    logger.info("built graph N=%d M=%d (dropped %d duplicates, %d self-loops)",
                graph.node_count, graph.arc_count, dropped_duplicates, dropped_self_loops)
    return graph


def bfs_levels(g: DirectedGraph, sources: Iterable[int], reverse: bool = False,
               allowed: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Multi-source BFS distances, expanding a whole frontier per step

    Args:
        g: Graph to traverse
        sources: Start nodes (distance 0)
        reverse: Follow arcs backwards (in-neighbors)
        allowed: Optional mask; only these nodes may be entered

    Returns:
        Distance per node, -1 where unreached
    """
    dist = np.full(g.node_count, -1, dtype=np.int64)
    frontier = np.unique(np.fromiter(sources, dtype=np.int64))
    dist[frontier] = 0
    gather = g.gather_in if reverse else g.gather_out
    level = 0
    while frontier.size:
        level += 1
        reached = gather(frontier)
        reached = reached[dist[reached] == -1]
        if allowed is not None:
            reached = reached[allowed[reached]]
        frontier = np.unique(reached).astype(np.int64)
        dist[frontier] = level
    return dist
