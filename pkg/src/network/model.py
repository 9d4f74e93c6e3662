"""
Network Model
Shared-link caching network: configuration, packet ids and the (C, W)
realizations every downstream module consumes.

Indices are 0-based throughout: files 0..m-1, packets 0..B-1, users 0..n-1.
A packet's global id is ``file * B + index``.
"""

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.exceptions import InvalidConfigError, InvalidInputError

SUM_TOLERANCE = 1e-9


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def _broadcast(value: Union[float, Sequence[float]], n: int, name: str, dtype) -> np.ndarray:
    arr = np.asarray(value, dtype=dtype)
    if arr.ndim == 0:
        return np.full(n, arr, dtype=dtype)
    if arr.shape != (n,):
        raise InvalidConfigError(f"expected {n} entries, got shape {arr.shape}", field=name)
    return arr


@dataclass(frozen=True, order=True)
class PacketId:
    """Packet ``index`` of ``file``; ordered lexicographically (file, index)."""
    file: int
    index: int

    def global_id(self, B: int) -> int:
        return self.file * B + self.index

    @classmethod
    def from_global(cls, pid: int, B: int) -> 'PacketId':
        return cls(int(pid) // B, int(pid) % B)


@dataclass(frozen=True, eq=False)
class NetworkConfig:
    """
    Library of m files split into B packets, shared by n users.

    M[u] is user u's cache size in files, L[u] its number of requests,
    Q[u, f] = q_{f,u} its demand distribution and P[u, f] = p_{f,u} its
    caching distribution.
    """
    m: int
    n: int
    B: int
    M: np.ndarray
    L: np.ndarray
    Q: np.ndarray
    P: np.ndarray
    seed: Optional[int] = None
    # Original JSON-style description, kept so sweeps can rebuild the config
    source: Optional[Dict[str, Any]] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.m < 1:
            raise InvalidConfigError("library must hold at least one file", field="m")
        if self.n < 1:
            raise InvalidConfigError("network needs at least one user", field="n")
        if self.B < 1:
            raise InvalidConfigError("packetization must be >= 1", field="B")

        M = _broadcast(self.M, self.n, "M", float)
        L = _broadcast(self.L, self.n, "L", int)
        Q = np.asarray(self.Q, dtype=float)
        P = np.asarray(self.P, dtype=float)
        if Q.ndim == 1:
            Q = np.tile(Q, (self.n, 1))
        if P.ndim == 1:
            P = np.tile(P, (self.n, 1))

        if np.any(M < 0) or np.any(M > self.m):
            raise InvalidConfigError(f"cache sizes must lie in [0, {self.m}]", field="M")
        if np.any(L < 1) or np.any(L > self.m):
            raise InvalidConfigError(f"request counts must lie in [1, {self.m}]", field="L")
        for name, mat in (("Q", Q), ("P", P)):
            if mat.shape != (self.n, self.m):
                raise InvalidConfigError(f"expected shape {(self.n, self.m)}, got {mat.shape}", field=name)
            if np.any(mat < 0) or np.any(mat > 1):
                raise InvalidConfigError("entries must lie in [0, 1]", field=name)
            bad = np.flatnonzero(np.abs(mat.sum(axis=1) - 1.0) > SUM_TOLERANCE)
            if bad.size:
                raise InvalidConfigError(f"row of user {int(bad[0])} does not sum to 1", field=name)

        caps = np.where(M > 0, 1.0 / np.where(M > 0, M, 1.0), np.inf)
        over = np.argwhere(P > caps[:, None] + SUM_TOLERANCE)
        if over.size:
            u, f = (int(x) for x in over[0])
            raise InvalidConfigError(
                f"p[{u},{f}] = {P[u, f]:.6g} exceeds 1/M_u = {caps[u]:.6g} "
                f"(would cache more than B packets of one file)", field="P")

        object.__setattr__(self, 'M', _readonly(M))
        object.__setattr__(self, 'L', _readonly(L))
        object.__setattr__(self, 'Q', _readonly(Q))
        object.__setattr__(self, 'P', _readonly(P))

    @property
    def is_homogeneous(self) -> bool:
        """Common q, p, M and L across users (Corollary regime)."""
        return bool(
            np.all(self.M == self.M[0]) and np.all(self.L == self.L[0])
            and np.allclose(self.Q, self.Q[0]) and np.allclose(self.P, self.P[0])
        )

    @property
    def packets_per_library(self) -> int:
        return self.m * self.B

    def with_updates(self, **changes) -> 'NetworkConfig':
        return replace(self, **changes)

    # ------------------------------------------------------------------
    # JSON interface
    # ------------------------------------------------------------------

    @classmethod
    def homogeneous(
        cls,
        m: int,
        n: int,
        B: int,
        M: float,
        L: int = 1,
        gamma: float = 0.0,
        P: Union[str, Sequence[float]] = "uniform",
        seed: Optional[int] = None
    ) -> 'NetworkConfig':
        """Common Zipf(gamma) demand, cache size M and L requests for all users."""
        doc = {"m": m, "n": n, "B": B, "M": M, "L": L, "Q": {"zipf": {"gamma": gamma}},
               "P": P if isinstance(P, str) else [list(P)] * n, "seed": seed}
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> 'NetworkConfig':
        from .demand import zipf_distribution

        for key in ("m", "n", "B", "M", "L", "Q"):
            if key not in doc:
                raise InvalidConfigError("missing required field", field=key)
        try:
            m, n, B = int(doc["m"]), int(doc["n"]), int(doc["B"])
        except (TypeError, ValueError) as e:
            raise InvalidConfigError(f"must be integers ({e})", field="m/n/B")

        M = _broadcast(doc["M"], n, "M", float)
        L = _broadcast(doc["L"], n, "L", int)

        q_spec = doc["Q"]
        if isinstance(q_spec, dict) and "zipf" in q_spec:
            gamma = float(q_spec["zipf"].get("gamma", 0.0))
            Q = np.tile(zipf_distribution(m, gamma), (n, 1))
        elif isinstance(q_spec, dict) and "uniform" in q_spec or q_spec == "uniform":
            Q = np.full((n, m), 1.0 / m)
        else:
            Q = np.asarray(q_spec, dtype=float)

        P = _parse_caching_distribution(doc.get("P", "uniform"), m, n, M, L, Q)
        seed = doc.get("seed")
        return cls(m=m, n=n, B=B, M=M, L=L, Q=Q, P=P,
                   seed=None if seed is None else int(seed), source=dict(doc))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m, "n": self.n, "B": self.B,
            "M": self.M.tolist(), "L": self.L.tolist(),
            "Q": self.Q.tolist(), "P": self.P.tolist(),
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> 'NetworkConfig':
        return cls.from_dict(load_json_document(path))

    def to_json(self, path: Union[str, Path]):
        with open(path, 'w') as f:
            json.dump(self.to_dict(), f, indent=2)


def _parse_caching_distribution(spec, m: int, n: int, M: np.ndarray, L: np.ndarray, Q: np.ndarray) -> np.ndarray:
    if spec == "uniform" or (isinstance(spec, dict) and "uniform" in spec):
        return np.full((n, m), 1.0 / m)
    if isinstance(spec, dict) and "truncated" in spec:
        m_tilde = int(spec["truncated"]["m_tilde"])
        return np.tile(truncated_uniform(Q[0], m_tilde), (n, 1))
    if spec == "optimized" or (isinstance(spec, dict) and "optimized" in spec):
        from src.analysis.bounds import optimize_caching_distribution
        return np.tile(optimize_caching_distribution(Q[0], float(M[0]), int(L[0]), n).p, (n, 1))
    return np.asarray(spec, dtype=float)


def truncated_uniform(q: np.ndarray, m_tilde: int) -> np.ndarray:
    """Mass 1/m_tilde on the m_tilde most popular files of q (ties -> lower index)."""
    m = len(q)
    if not 1 <= m_tilde <= m:
        raise InvalidConfigError(f"m_tilde must lie in [1, {m}]", field="P.truncated.m_tilde")
    order = np.argsort(-np.asarray(q), kind="stable")
    p = np.zeros(m)
    p[order[:m_tilde]] = 1.0 / m_tilde
    return p


def load_json_document(path: Union[str, Path]) -> Dict[str, Any]:
    """Parse a JSON file, reporting syntax errors with line/column."""
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidConfigError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}")
    except OSError as e:
        raise InvalidConfigError(f"cannot read {path}: {e}")


@dataclass(frozen=True, eq=False)
class CacheRealization:
    """C: ``cached[u, f, i]`` is True when user u stores packet i of file f."""
    cached: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.cached, dtype=bool)
        if arr.ndim != 3:
            raise InvalidInputError(f"cache realization must be (n, m, B), got shape {arr.shape}")
        object.__setattr__(self, 'cached', _readonly(arr))

    @property
    def n(self) -> int:
        return self.cached.shape[0]

    @property
    def m(self) -> int:
        return self.cached.shape[1]

    @property
    def B(self) -> int:
        return self.cached.shape[2]

    @property
    def flat(self) -> np.ndarray:
        """(n, m*B) view indexed by global packet id."""
        return self.cached.reshape(self.n, self.m * self.B)

    def packets(self, u: int, f: int) -> FrozenSet[int]:
        return frozenset(np.flatnonzero(self.cached[u, f]).tolist())

    def counts(self) -> np.ndarray:
        """|C_{u,f}| for every (u, f)."""
        return self.cached.sum(axis=2)

    @classmethod
    def empty(cls, n: int, m: int, B: int) -> 'CacheRealization':
        return cls(np.zeros((n, m, B), dtype=bool))

    @classmethod
    def from_sets(cls, sets: Dict[Tuple[int, int], Iterable[int]], n: int, m: int, B: int) -> 'CacheRealization':
        """Build from {(u, f): packet indices}."""
        cached = np.zeros((n, m, B), dtype=bool)
        for (u, f), idx in sets.items():
            cached[u, f, list(idx)] = True
        return cls(cached)


@dataclass(frozen=True, eq=False)
class DemandRealization:
    """
    W: per user the requested file vector f_u (duplicates removed, first
    occurrence kept) and the still-needed packets W_{u,f} of each request.
    """
    requests: Tuple[Tuple[int, ...], ...]
    needed: Tuple[Dict[int, FrozenSet[int]], ...]
    raw_requests: Tuple[Tuple[int, ...], ...] = ()

    @property
    def n(self) -> int:
        return len(self.requests)

    @classmethod
    def from_requests(cls, requests: Sequence[Sequence[int]], cache: CacheRealization) -> 'DemandRealization':
        if len(requests) != cache.n:
            raise InvalidInputError(f"{len(requests)} request vectors for {cache.n} users")
        deduped: List[Tuple[int, ...]] = []
        needed: List[Dict[int, FrozenSet[int]]] = []
        for u, files in enumerate(requests):
            files = tuple(dict.fromkeys(int(f) for f in files))
            for f in files:
                if not 0 <= f < cache.m:
                    raise InvalidInputError(f"user {u} requests file {f} outside [0, {cache.m})")
            deduped.append(files)
            needed.append({f: frozenset(np.flatnonzero(~cache.cached[u, f]).tolist()) for f in files})
        return cls(
            requests=tuple(deduped),
            needed=tuple(needed),
            raw_requests=tuple(tuple(int(f) for f in files) for files in requests),
        )

    def needed_count(self) -> int:
        return sum(len(pkts) for per_user in self.needed for pkts in per_user.values())


def realization_from_dict(doc: Dict[str, Any], config: NetworkConfig) -> Tuple[CacheRealization, List[List[int]]]:
    """
    Fixed (C, requests) pair: ``cache`` lists [user, file, [packet indices]]
    entries and ``requests`` holds one file list per user.
    """
    try:
        sets = {(int(u), int(f)): [int(i) for i in idx] for u, f, idx in doc.get("cache", [])}
        requests = [[int(f) for f in files] for files in doc["requests"]]
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidConfigError(f"malformed realization ({e})", field="realization")
    for (u, f), idx in sets.items():
        if not (0 <= u < config.n and 0 <= f < config.m) or any(not 0 <= i < config.B for i in idx):
            raise InvalidConfigError(f"cache entry {(u, f, idx)} outside the network", field="realization.cache")
    if len(requests) != config.n:
        raise InvalidConfigError(f"{len(requests)} request lists for {config.n} users", field="realization.requests")
    return CacheRealization.from_sets(sets, config.n, config.m, config.B), requests
