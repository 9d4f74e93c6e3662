"""
Greedy Constrained Local Coloring (GCLC)
GCLC_1 groups vertices by |T_v|, GCLC_2 merges vertices carrying the same
packet; GCLC returns whichever has the smaller local number.
"""

import time
from typing import Optional, Sequence

import numpy as np

from config import GCLC1_GROUPING
from src.conflict_graph.graph import ConflictGraph
from src.exceptions import InvalidConfigError, InvalidInputError
from src.utils.logger import logger

from .outcome import Algorithm, Coloring, ColoringOutcome, local_number


def grow_independent_set(g: ConflictGraph, seed: int, candidates: np.ndarray, limit: Optional[int] = None) -> np.ndarray:
    """
    Scan ``candidates`` in order, adding each packet group that has no edge to
    the set grown so far from ``seed``. Vertices of one packet join together:
    the seed brings its mates from ``candidates``, and a later candidate is
    skipped with all its mates when any of them is blocked or the group would
    overshoot ``limit``. Stops once ``limit`` members exist.
    """
    candidates = np.asarray(candidates, dtype=np.int64)
    codes = g.code[candidates]
    done = codes == g.code[seed]
    members = [int(seed)] + candidates[done].tolist()
    if limit is not None and len(members) >= limit:
        return np.array(members, dtype=np.int64)
    blocked = np.zeros(len(candidates), dtype=bool)
    for x in members:
        blocked |= g.neighbor_mask(x, candidates)
    pos = 0
    while pos < len(candidates):
        open_ = np.flatnonzero(~(blocked[pos:] | done[pos:]))
        if not open_.size:
            break
        j = pos + int(open_[0])
        group = np.flatnonzero((codes == codes[j]) & ~done)
        done[group] = True
        pos = j + 1
        if blocked[group].any():
            continue
        if limit is not None and len(members) + len(group) > limit:
            continue
        members.extend(candidates[group].tolist())
        if limit is not None and len(members) >= limit:
            break
        for x in candidates[group].tolist():
            blocked |= g.neighbor_mask(x, candidates)
    return np.array(members, dtype=np.int64)


def _group_keys(g: ConflictGraph, meta: Optional[Sequence[frozenset]], grouping: str) -> np.ndarray:
    if grouping not in ("cardinality", "set"):
        raise InvalidConfigError(f"unknown grouping {grouping!r}", field="gclc1_grouping")
    if meta is not None and len(meta) != g.size:
        raise InvalidInputError(f"{len(meta)} T_v sets for {g.size} vertices")
    if g.size == 0:
        return np.empty(0, dtype=np.int64)
    # One key per packet so that a packet's vertices always share a group
    if grouping == "cardinality":
        sizes = g.t_sizes if meta is None else np.array([len(t) for t in meta], dtype=np.int64)
        return sizes[[int(grp[0]) for grp in g.packet_groups]][g.code]
    sets = g.t_sets() if meta is None else [frozenset(t) for t in meta]
    merged = [frozenset().union(*(sets[v] for v in grp.tolist())) for grp in g.packet_groups]
    index = {}
    return np.array([index.setdefault(s, len(index)) for s in merged], dtype=np.int64)[g.code]


def gclc1(
    g: ConflictGraph,
    meta: Optional[Sequence[frozenset]] = None,
    grouping: str = GCLC1_GROUPING
) -> ColoringOutcome:
    """
    Repeatedly take the smallest uncolored vertex v and greedily collect, in
    id order, uncolored vertices with the same |T_v| that keep the class
    independent. "set" mode groups on the packet's whole user set, the union
    of T_v over the vertices requesting it.
    """
    start = time.perf_counter()
    keys = _group_keys(g, meta, grouping)
    colors = np.full(g.size, -1, dtype=np.int64)
    uncolored = np.ones(g.size, dtype=bool)
    next_color = 0
    v = 0
    while v < g.size:
        cand = np.flatnonzero(uncolored & (keys == keys[v]))
        members = grow_independent_set(g, v, cand[cand != v])
        colors[members] = next_color
        uncolored[members] = False
        next_color += 1
        rest = np.flatnonzero(uncolored[v:])
        v = v + int(rest[0]) if rest.size else g.size

    coloring = Coloring(colors)
    nu = local_number(g, coloring, validate=False)
    elapsed = (time.perf_counter() - start) * 1000
    logger.debug(f"GCLC1: |V|={g.size} colors={coloring.num_colors} nu={nu} ({elapsed:.1f} ms)")
    return ColoringOutcome(coloring, nu, Algorithm.GCLC1, elapsed)


def gclc2(g: ConflictGraph) -> ColoringOutcome:
    """One color per distinct requested packet."""
    start = time.perf_counter()
    coloring = Coloring.compact(g.code)
    nu = local_number(g, coloring, validate=False)
    elapsed = (time.perf_counter() - start) * 1000
    logger.debug(f"GCLC2: |V|={g.size} colors={coloring.num_colors} nu={nu} ({elapsed:.1f} ms)")
    return ColoringOutcome(coloring, nu, Algorithm.GCLC2, elapsed)


def pick_smaller(first: ColoringOutcome, second: ColoringOutcome) -> ColoringOutcome:
    """Smaller local number wins; ties keep ``first``."""
    return first if first.local_number <= second.local_number else second


def gclc(
    g: ConflictGraph,
    meta: Optional[Sequence[frozenset]] = None,
    grouping: str = GCLC1_GROUPING
) -> ColoringOutcome:
    return pick_smaller(gclc1(g, meta, grouping), gclc2(g))
