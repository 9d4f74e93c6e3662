"""
Colorings of the conflict graph and their local chromatic evaluation.
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, FrozenSet, List, Union

import numpy as np

from config import HGLC_A, HGLC_B
from src.conflict_graph.graph import ConflictGraph, closed_out_neighborhood
from src.exceptions import ColoringValidityError, InvalidConfigError

# Pairwise check below this class size, row-by-row above it
_PAIRWISE_LIMIT = 256


class Algorithm(str, Enum):
    GCLC1 = "GCLC1"
    GCLC2 = "GCLC2"
    HGLC1 = "HGLC1"
    ORACLE = "ORACLE"


@dataclass(frozen=True, eq=False)
class Coloring:
    """Total vertex -> color map using every color 0..num_colors-1."""
    color_of: np.ndarray

    def __post_init__(self):
        arr = np.array(self.color_of, dtype=np.int64, copy=True)
        if arr.size and arr.min() < 0:
            raise ColoringValidityError(f"vertex {int(np.argmin(arr))} is uncolored")
        if arr.size and np.unique(arr).size != arr.max() + 1:
            raise ColoringValidityError("color ids must be dense 0..k-1; use Coloring.compact()")
        arr.setflags(write=False)
        object.__setattr__(self, 'color_of', arr)

    @classmethod
    def compact(cls, colors) -> 'Coloring':
        """Relabel arbitrary color ids densely in order of first appearance."""
        colors = np.asarray(colors, dtype=np.int64)
        if colors.size and colors.min() < 0:
            raise ColoringValidityError(f"vertex {int(np.argmin(colors))} is uncolored")
        _, first, inverse = np.unique(colors, return_index=True, return_inverse=True)
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(first))
        return cls(rank[inverse.reshape(-1)])

    @property
    def num_colors(self) -> int:
        return int(self.color_of.max()) + 1 if self.color_of.size else 0

    def __len__(self) -> int:
        return len(self.color_of)

    def classes(self) -> List[np.ndarray]:
        """Vertex ids of each color class, indexed by color."""
        if not self.color_of.size:
            return []
        order = np.argsort(self.color_of, kind="stable")
        bounds = np.cumsum(np.bincount(self.color_of))[:-1]
        return np.split(order, bounds)


@dataclass(frozen=True)
class HglcParams:
    """Pick-window fractions for HgLC_1: ``a`` sizes W1, ``b`` sizes W2."""
    a: float = HGLC_A
    b: float = HGLC_B

    def __post_init__(self):
        for name in ("a", "b"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidConfigError(f"must lie in [0, 1], got {value}", field=name)


@dataclass(frozen=True, eq=False)
class ColoringOutcome:
    coloring: Coloring
    local_number: int
    algorithm: Algorithm
    runtime_ms: float = field(default=0.0)

    @property
    def num_colors(self) -> int:
        return self.coloring.num_colors

    def rate(self, B: int) -> float:
        """Transmission rate in file units."""
        return self.local_number / B

    def neighborhood_colors(self, g: ConflictGraph) -> List[FrozenSet[int]]:
        """c(N+(v)) for every vertex."""
        colors = self.coloring.color_of
        return [frozenset(colors[list(closed_out_neighborhood(g, v))].tolist()) for v in range(g.size)]

    def summary(self) -> Dict[str, Union[str, int, float]]:
        return {
            "algorithm": self.algorithm.value,
            "num_colors": self.num_colors,
            "local_number": self.local_number,
            "runtime_ms": round(self.runtime_ms, 3),
        }

    def dump(self, coloring_path: Union[str, Path], summary_path: Union[str, Path, None] = None):
        """Write "<vertex-id> <color-id>" lines and, optionally, the JSON summary."""
        with open(coloring_path, 'w') as f:
            for v, c in enumerate(self.coloring.color_of.tolist()):
                f.write(f"{v} {c}\n")
        if summary_path is not None:
            with open(summary_path, 'w') as f:
                json.dump(self.summary(), f, indent=2)


def validate_coloring(g: ConflictGraph, c: Coloring):
    """Raise ColoringValidityError naming an edge whose endpoints share a color."""
    if len(c) != g.size:
        raise ColoringValidityError(f"coloring covers {len(c)} vertices, graph has {g.size}")
    for color, members in enumerate(c.classes()):
        if len(members) < 2:
            continue
        if len(members) <= _PAIRWISE_LIMIT:
            codes = g.code[members]
            users = g.user[members]
            lacks = ~g.cached_req[users[:, None], codes[None, :]]
            clash = (lacks | lacks.T) & (codes[:, None] != codes[None, :])
            if clash.any():
                i, j = np.argwhere(clash)[0]
                edge = (int(members[i]), int(members[j]))
                raise ColoringValidityError(f"adjacent vertices {edge} share color {color}", edge=edge)
        else:
            for x in members:
                hit = np.flatnonzero(g.neighbor_mask(x, members))
                if hit.size:
                    edge = (int(x), int(members[hit[0]]))
                    raise ColoringValidityError(f"adjacent vertices {edge} share color {color}", edge=edge)


def neighborhood_color_counts(g: ConflictGraph, c: Coloring) -> np.ndarray:
    """
    |c(N+(v))| for every vertex.

    N+(v) holds v plus every vertex whose packet v's user lacks, except the
    other requesters of v's own packet, so the count is evaluated per user
    from a color histogram of the lacked vertices.
    """
    colors = c.color_of
    k = c.num_colors
    counts = np.zeros(g.size, dtype=np.int64)
    group_stats = [np.unique(colors[grp], return_counts=True) for grp in g.packet_groups]

    for u in range(g.n_users):
        own = g.user_vertices(u)
        if not own.size:
            continue
        lacked = ~g.cached_req[u, g.code]
        hist = np.bincount(colors[lacked], minlength=k)
        distinct = int(np.count_nonzero(hist))
        for v in own.tolist():
            code = g.code[v]
            if g.code_count[code] == 1:
                counts[v] = distinct
                continue
            vals, per_color = group_stats[code]
            exhausted = hist[vals] == per_color
            own_exhausted = bool(exhausted[vals == colors[v]][0])
            counts[v] = distinct - int(exhausted.sum()) + int(own_exhausted)
    return counts


def local_number(g: ConflictGraph, c: Coloring, validate: bool = True) -> int:
    """nu = max_v |c(N+(v))|; 0 for the empty graph."""
    if validate:
        validate_coloring(g, c)
    if g.size == 0:
        return 0
    return int(neighborhood_color_counts(g, c).max())
