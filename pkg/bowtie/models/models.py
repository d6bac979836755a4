"""
Domain models for the bow-tie pipeline
Component labels, account metadata, and the Dataset that binds metadata to a graph
"""
import uuid
from dataclasses import dataclass, field
from datetime import date
from enum import Enum, IntEnum
from typing import Dict, FrozenSet, Iterable, Optional

import numpy as np

from bowtie.graph_core import DirectedGraph


class ComponentLabel(IntEnum):
    """The eight components of a directed graph's macrostructure"""
    LSC = 0
    IN = 1
    OUT = 2
    IN_TENDRILS = 3
    OUT_TENDRILS = 4
    BRIDGES = 5
    OTHER = 6
    DISCONNECTED = 7

    @classmethod
    def parse(cls, name: str) -> 'ComponentLabel':
        """Look up a label by name, accepting '-' for '_' and any case"""
        key = name.strip().upper().replace('-', '_')
        try:
            return cls[key]
        except KeyError:
            raise ValueError(f"Unknown component '{name}'. Choose: {', '.join(l.name for l in cls)}")


LABEL_COUNT = len(ComponentLabel)

# Labels that carry a single level
LEVELED_LABELS = (
    ComponentLabel.IN,
    ComponentLabel.OUT,
    ComponentLabel.IN_TENDRILS,
    ComponentLabel.OUT_TENDRILS,
)


class AccountStatus(str, Enum):
    """Account status as reported by the platform"""
    ACTIVE = 'active'
    SUSPENDED = 'suspended'
    DEACTIVATED = 'deactivated'
    UNKNOWN = 'unknown'

    @property
    def code(self) -> int:
        return STATUS_ORDER.index(self)


STATUS_ORDER = list(AccountStatus)

FLAG_VERIFIED = 'verified'
FLAG_EXPERT = 'expert'


@dataclass(frozen=True)
class NodeMeta:
    """Per-account metadata keyed by external ID"""
    created_at: Optional[date] = None
    tweet_count: int = 0
    api_followers: int = 0
    api_followings: int = 0
    protected: bool = False
    status: AccountStatus = AccountStatus.UNKNOWN
    flags: FrozenSet[str] = frozenset()
    last_tweet_at: Optional[date] = None


def _to_day(value: Optional[date]) -> np.datetime64:
    return np.datetime64(value, 'D') if value is not None else np.datetime64('NaT', 'D')


@dataclass
class Dataset:
    """
    A graph plus column-oriented metadata aligned to its node indices

    Nodes without a metadata record hold defaults (status unknown, no dates).
    Metadata-only accounts are graph nodes with no arcs and `isolated` set.
    """
    graph: DirectedGraph
    has_meta: np.ndarray
    created_at: np.ndarray
    last_tweet_at: np.ndarray
    tweets: np.ndarray
    api_followers: np.ndarray
    api_followings: np.ndarray
    protected: np.ndarray
    status: np.ndarray
    verified: np.ndarray
    expert: np.ndarray
    isolated: np.ndarray
    provenance: Dict = field(default_factory=dict)
    origin: str = field(default_factory=lambda: uuid.uuid4().hex)

    @classmethod
    def from_graph(cls, graph: DirectedGraph, meta: Optional[Dict[int, NodeMeta]] = None,
                   isolated_ids: Iterable[int] = (), provenance: Optional[Dict] = None) -> 'Dataset':
        """
        Bind a metadata table to a graph

        Args:
            graph: Graph whose nodes include every metadata ID
            meta: ExternalId -> NodeMeta table
            isolated_ids: IDs that appear only in the metadata
            provenance: Source files and dropped-item counts
        """
        n = graph.node_count
        dataset = cls(
            graph=graph,
            has_meta=np.zeros(n, dtype=bool),
            created_at=np.full(n, np.datetime64('NaT', 'D')),
            last_tweet_at=np.full(n, np.datetime64('NaT', 'D')),
            tweets=np.zeros(n, dtype=np.int64),
            api_followers=np.zeros(n, dtype=np.int64),
            api_followings=np.zeros(n, dtype=np.int64),
            protected=np.zeros(n, dtype=bool),
            status=np.full(n, AccountStatus.UNKNOWN.code, dtype=np.int8),
            verified=np.zeros(n, dtype=bool),
            expert=np.zeros(n, dtype=bool),
            isolated=np.zeros(n, dtype=bool),
            provenance=dict(provenance or {}),
        )

        if meta:
            ids = np.fromiter(meta.keys(), dtype=np.uint64, count=len(meta))
            idx = graph.index_of_many(ids)
            records = list(meta.values())
            dataset.has_meta[idx] = True
            dataset.created_at[idx] = np.array([_to_day(r.created_at) for r in records], dtype='datetime64[D]')
            dataset.last_tweet_at[idx] = np.array([_to_day(r.last_tweet_at) for r in records], dtype='datetime64[D]')
            dataset.tweets[idx] = [r.tweet_count for r in records]
            dataset.api_followers[idx] = [r.api_followers for r in records]
            dataset.api_followings[idx] = [r.api_followings for r in records]
            dataset.protected[idx] = [r.protected for r in records]
            dataset.status[idx] = [r.status.code for r in records]
            dataset.verified[idx] = [FLAG_VERIFIED in r.flags for r in records]
            dataset.expert[idx] = [FLAG_EXPERT in r.flags for r in records]

        isolated = np.fromiter(isolated_ids, dtype=np.uint64)
        if isolated.size:
            dataset.isolated[graph.index_of_many(isolated)] = True

        return dataset

    @property
    def node_count(self) -> int:
        return self.graph.node_count

    def meta_for(self, external_id: int) -> NodeMeta:
        """Reassemble the NodeMeta record of one account"""
        n = self.graph.index_of(external_id)
        flags = set()
        if self.verified[n]:
            flags.add(FLAG_VERIFIED)
        if self.expert[n]:
            flags.add(FLAG_EXPERT)
        created = self.created_at[n]
        last = self.last_tweet_at[n]
        return NodeMeta(
            created_at=None if np.isnat(created) else created.astype(object),
            tweet_count=int(self.tweets[n]),
            api_followers=int(self.api_followers[n]),
            api_followings=int(self.api_followings[n]),
            protected=bool(self.protected[n]),
            status=STATUS_ORDER[int(self.status[n])],
            flags=frozenset(flags),
            last_tweet_at=None if np.isnat(last) else last.astype(object),
        )

    def status_mask(self, status: AccountStatus) -> np.ndarray:
        return self.status == status.code

    def max_created_at(self) -> Optional[date]:
        """Latest known creation date, or None when no account has one"""
        known = self.created_at[~np.isnat(self.created_at)]
        if known.size == 0:
            return None
        return known.max().astype(object)

    def subset(self, keep: np.ndarray, note: Optional[Dict] = None) -> 'Dataset':
        """
        Restrict to the nodes selected by a boolean mask

        Node order is preserved so every column is sliced with the same mask.
        The subset keeps this dataset's origin.
        """
        keep = np.asarray(keep, dtype=bool)
        provenance = dict(self.provenance)
        if note:
            provenance.update(note)
        return Dataset(
            graph=self.graph.induced_subgraph(keep),
            has_meta=self.has_meta[keep],
            created_at=self.created_at[keep],
            last_tweet_at=self.last_tweet_at[keep],
            tweets=self.tweets[keep],
            api_followers=self.api_followers[keep],
            api_followings=self.api_followings[keep],
            protected=self.protected[keep],
            status=self.status[keep],
            verified=self.verified[keep],
            expert=self.expert[keep],
            isolated=self.isolated[keep],
            provenance=provenance,
            origin=self.origin,
        )
