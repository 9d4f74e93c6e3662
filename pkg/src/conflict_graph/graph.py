"""
Conflict Graph
Directed graph on (packet, user) vertices. Edge v2 -> v1 exists iff the
packet of v1 is not cached by the user of v2 and the two packets differ.

Adjacency is never stored as an |V| x |V| matrix: rows are derived on demand
from the (user x requested-packet) cache bitmap, which keeps graphs of ten
thousand vertices and more cheap to build. Full sorted adjacency lists are
materialized lazily for small graphs and tests.
"""

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import FrozenSet, List, Optional, Tuple, Union

import networkx as nx
import numpy as np

from src.exceptions import InvalidInputError
from src.network.model import CacheRealization, DemandRealization, PacketId


@dataclass(frozen=True)
class Vertex:
    id: int
    packet: PacketId
    user: int


class ConflictGraph:
    """H_{C,W} with dense vertex ids in (user, file, packet-index) order."""

    def __init__(self, cache: CacheRealization, demand: DemandRealization, users: np.ndarray, packets: np.ndarray):
        self.cache = cache
        self.demand = demand
        self.B = cache.B
        self.n_users = cache.n

        self.user = np.asarray(users, dtype=np.int64)
        self.packet = np.asarray(packets, dtype=np.int64)
        for arr in (self.user, self.packet):
            arr.setflags(write=False)

        # Distinct requested packets and each vertex's code into them
        self.packet_ids, code = np.unique(self.packet, return_inverse=True)
        self.code = code.astype(np.int64).reshape(-1)
        self.code_count = np.bincount(self.code, minlength=len(self.packet_ids))

        flat = cache.flat
        # cached_req[u, k]: user u stores requested packet k
        self.cached_req = np.ascontiguousarray(flat[:, self.packet_ids])
        self._cached_req_T = np.ascontiguousarray(self.cached_req.T)

        self.user_offsets = np.searchsorted(self.user, np.arange(self.n_users + 1))

    def __len__(self) -> int:
        return len(self.user)

    @property
    def size(self) -> int:
        return len(self.user)

    @cached_property
    def vertices(self) -> List[Vertex]:
        return [
            Vertex(id=i, packet=PacketId.from_global(p, self.B), user=int(u))
            for i, (p, u) in enumerate(zip(self.packet.tolist(), self.user.tolist()))
        ]

    def _check(self, v: int):
        if not 0 <= int(v) < self.size:
            raise InvalidInputError(f"vertex id {v} outside [0, {self.size})")

    def user_vertices(self, u: int) -> np.ndarray:
        return np.arange(self.user_offsets[u], self.user_offsets[u + 1])

    @cached_property
    def packet_groups(self) -> List[np.ndarray]:
        """Vertex ids per requested packet (indexed by packet code)."""
        if self.size == 0:
            return []
        order = np.argsort(self.code, kind="stable")
        bounds = np.cumsum(self.code_count)[:-1]
        return np.split(order, bounds)

    # ------------------------------------------------------------------
    # Adjacency rows
    # ------------------------------------------------------------------

    def out_mask(self, v: int, among: Optional[np.ndarray] = None) -> np.ndarray:
        """Boolean row: v -> w for w in ``among`` (all vertices by default)."""
        codes = self.code if among is None else self.code[among]
        cv = self.code[v]
        return ~self.cached_req[self.user[v], codes] & (codes != cv)

    def in_mask(self, v: int, among: Optional[np.ndarray] = None) -> np.ndarray:
        """Boolean row: w -> v for w in ``among``."""
        codes = self.code if among is None else self.code[among]
        users = self.user if among is None else self.user[among]
        cv = self.code[v]
        return ~self._cached_req_T[cv, users] & (codes != cv)

    def neighbor_mask(self, v: int, among: Optional[np.ndarray] = None) -> np.ndarray:
        """Undirected adjacency row."""
        codes = self.code if among is None else self.code[among]
        users = self.user if among is None else self.user[among]
        cv = self.code[v]
        return (~self.cached_req[self.user[v], codes] | ~self._cached_req_T[cv, users]) & (codes != cv)

    def adjacent(self, v: int, w: int) -> bool:
        return bool(self.neighbor_mask(v, np.array([w]))[0])

    def has_edge(self, src: int, dst: int) -> bool:
        return bool(self.out_mask(src, np.array([dst]))[0])

    def out_neighbors(self, v: int) -> np.ndarray:
        self._check(v)
        return np.flatnonzero(self.out_mask(v))

    def in_neighbors(self, v: int) -> np.ndarray:
        self._check(v)
        return np.flatnonzero(self.in_mask(v))

    def neighbors(self, v: int) -> np.ndarray:
        self._check(v)
        return np.flatnonzero(self.neighbor_mask(v))

    @cached_property
    def out_adj(self) -> Tuple[np.ndarray, ...]:
        return tuple(self.out_neighbors(v) for v in range(self.size))

    @cached_property
    def in_adj(self) -> Tuple[np.ndarray, ...]:
        return tuple(self.in_neighbors(v) for v in range(self.size))

    @cached_property
    def undirected_adj(self) -> Tuple[np.ndarray, ...]:
        return tuple(self.neighbors(v) for v in range(self.size))

    # ------------------------------------------------------------------
    # Degree and cover statistics
    # ------------------------------------------------------------------

    @cached_property
    def out_degrees(self) -> np.ndarray:
        # v's out-neighbours: every vertex whose packet v's user lacks, minus v's own packet group
        uncached_count = (~self.cached_req).astype(np.int64) @ self.code_count
        return uncached_count[self.user] - self.code_count[self.code]

    @cached_property
    def in_degrees(self) -> np.ndarray:
        per_user = np.diff(self.user_offsets)
        lacking = per_user @ (~self.cached_req).astype(np.int64)
        return lacking[self.code] - self.code_count[self.code]

    @property
    def edge_count(self) -> int:
        return int(self.out_degrees.sum())

    @cached_property
    def cacher_count(self) -> np.ndarray:
        """Users caching each vertex's packet."""
        return self.cached_req.sum(axis=0)[self.code]

    @cached_property
    def requester_count(self) -> np.ndarray:
        """Users that still need each vertex's packet (one vertex each)."""
        return self.code_count[self.code]

    @cached_property
    def t_sizes(self) -> np.ndarray:
        """|T_v| = |{mu(v)} u {u : rho(v) in C_u}|."""
        return 1 + self.cacher_count

    @cached_property
    def k_sizes(self) -> np.ndarray:
        """|K_v| = |{u : rho(v) in W_u u C_u}|."""
        return self.cacher_count + self.requester_count

    def t_sets(self) -> List[FrozenSet[int]]:
        return [
            frozenset([int(self.user[v])] + np.flatnonzero(self._cached_req_T[self.code[v]]).tolist())
            for v in range(self.size)
        ]

    def k_sets(self) -> List[FrozenSet[int]]:
        requesters = [frozenset(self.user[g].tolist()) for g in self.packet_groups]
        return [
            requesters[self.code[v]] | frozenset(np.flatnonzero(self._cached_req_T[self.code[v]]).tolist())
            for v in range(self.size)
        ]

    # ------------------------------------------------------------------
    # Export
    # ------------------------------------------------------------------

    def edges(self):
        for v in range(self.size):
            for w in self.out_neighbors(v):
                yield v, int(w)

    def to_dimacs(self) -> str:
        """DIMACS-style edge list, 1-based vertex numbers."""
        lines = [f"p {self.size} {self.edge_count}"]
        lines.extend(f"e {v + 1} {w + 1}" for v, w in self.edges())
        return "\n".join(lines) + "\n"

    def write_dimacs(self, path: Union[str, Path]):
        with open(path, 'w') as f:
            f.write(self.to_dimacs())

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        for vert in self.vertices:
            graph.add_node(vert.id, packet=(vert.packet.file, vert.packet.index), user=vert.user)
        graph.add_edges_from(self.edges())
        return graph


def build_conflict_graph(cache: CacheRealization, demand: DemandRealization) -> ConflictGraph:
    """One vertex per (needed packet, user); ids in (user, file, packet-index) order."""
    if cache.n != demand.n:
        raise InvalidInputError(f"cache has {cache.n} users, demand has {demand.n}")

    users: List[int] = []
    packets: List[int] = []
    for u, per_user in enumerate(demand.needed):
        for f in sorted(per_user):
            if not 0 <= f < cache.m:
                raise InvalidInputError(f"user {u} needs file {f} outside [0, {cache.m})")
            idx = sorted(per_user[f])
            if idx and (idx[-1] >= cache.B or cache.cached[u, f, idx].any()):
                raise InvalidInputError(f"W[{u},{f}] is inconsistent with the cache realization")
            users.extend([u] * len(idx))
            packets.extend(f * cache.B + i for i in idx)

    return ConflictGraph(cache, demand, np.array(users, dtype=np.int64), np.array(packets, dtype=np.int64))


def closed_out_neighborhood(g: ConflictGraph, v: int) -> FrozenSet[int]:
    """N+(v) = {v} u out_adj(v)."""
    return frozenset([int(v)] + g.out_neighbors(v).tolist())
