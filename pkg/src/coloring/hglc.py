"""
Hierarchical greedy Local Coloring (HgLC)

Vertices are processed by hierarchy i = n..1 where G_i starts as
{v : |K_v| = i}. At each level we first color exact-size-i independent sets
of vertices with |K_v| = i, then grow independent sets from random picks in
the W1 window and accept them when they reach size i; failed picks drop to
G_{i-1}. LocalSearch then tries to retire whole color classes. Vertices of
one packet are placed, demoted and moved together.
"""

import math
import time
from typing import Optional, Sequence

import numpy as np

from src.conflict_graph.graph import ConflictGraph
from src.exceptions import InvalidInputError
from src.utils.logger import logger
from src.utils.seeding import SeedLike, make_rng

from .gclc import gclc2, grow_independent_set, pick_smaller
from .outcome import Algorithm, Coloring, ColoringOutcome, HglcParams, local_number, validate_coloring


def window_upper(k_values: np.ndarray, fraction: float) -> int:
    """min|K| + floor(fraction * (max|K| - min|K|))."""
    kmin, kmax = int(k_values.min()), int(k_values.max())
    return kmin + int(math.floor(fraction * (kmax - kmin) + 1e-12))


def window_visit_order(k_values: np.ndarray, fraction: float, rng: np.random.Generator) -> np.ndarray:
    """
    Order in which the W2 rule visits a candidate pool: each step picks
    uniformly among remaining candidates whose |K| lies in the current window.
    While the window is unchanged those picks are a uniform permutation of
    the window, and the window only moves once its lowest |K| bucket empties,
    so the order is produced one window at a time.
    """
    k_values = np.asarray(k_values)
    remaining = np.ones(len(k_values), dtype=bool)
    chunks = []
    while remaining.any():
        rest = np.flatnonzero(remaining)
        ks = k_values[rest]
        kmin, kmax = int(ks.min()), int(ks.max())
        hi = window_upper(ks, fraction)
        perm = rng.permutation(rest[ks <= hi])
        if hi >= kmax:
            chunks.append(perm)
            break
        last_min = int(np.flatnonzero(k_values[perm] == kmin)[-1])
        taken = perm[:last_min + 1]
        chunks.append(taken)
        remaining[taken] = False
    return np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)


def local_search(g: ConflictGraph, c: Coloring, rng: Optional[np.random.Generator] = None) -> Coloring:
    """
    Visit color classes in ascending order; a class is retired when each of
    its packet groups can move to a lower live color absent from the
    neighbourhoods of all its vertices. Members of one class are mutually
    non-adjacent, so their moves never interfere. Without ``rng`` the lowest
    available color is taken.
    """
    validate_coloring(g, c)
    colors = c.color_of.copy()
    k = c.num_colors
    live = np.ones(k, dtype=bool)
    retired = 0

    for color in range(1, k):
        members = np.flatnonzero(colors == color)
        lower = live.copy()
        lower[color:] = False
        moves = []
        for code in np.unique(g.code[members]).tolist():
            group = members[g.code[members] == code]
            allowed = lower.copy()
            for x in group.tolist():
                allowed[colors[g.neighbor_mask(x)]] = False
            options = np.flatnonzero(allowed)
            if not options.size:
                break
            moves.append((group, int(rng.choice(options)) if rng is not None else int(options[0])))
        else:
            for group, target in moves:
                colors[group] = target
            live[color] = False
            retired += 1

    if retired:
        logger.debug(f"LocalSearch retired {retired} of {k} colors")
    return Coloring.compact(colors)


def hglc1(
    g: ConflictGraph,
    meta: Optional[Sequence[frozenset]] = None,
    params: HglcParams = HglcParams(),
    seed: SeedLike = None
) -> ColoringOutcome:
    start = time.perf_counter()
    rng = make_rng(seed)
    if meta is not None:
        if len(meta) != g.size:
            raise InvalidInputError(f"{len(meta)} K_v sets for {g.size} vertices")
        k = np.array([len(s) for s in meta], dtype=np.int64)
    else:
        k = g.k_sizes.astype(np.int64)
    if g.size:
        k = k[[int(grp[0]) for grp in g.packet_groups]][g.code]

    level = k.copy()
    colors = np.full(g.size, -1, dtype=np.int64)
    uncolored = np.ones(g.size, dtype=bool)
    next_color = 0

    top = max(g.n_users, int(k.max()) if g.size else 0)
    for i in range(top, 0, -1):
        in_level = uncolored & (level == i)
        if not in_level.any():
            continue

        # Exact-size-i independent sets among vertices with |K_v| = i
        for v in np.flatnonzero(in_level & (k == i)).tolist():
            if not uncolored[v]:
                continue
            peers = np.flatnonzero(uncolored & (level == i) & (k == i))
            peers = peers[peers != v]
            if len(peers) + 1 < i:
                break
            if np.count_nonzero(~g.neighbor_mask(v, peers)) + 1 < i:
                continue
            members = grow_independent_set(g, v, peers, limit=i)
            if len(members) == i:
                colors[members] = next_color
                uncolored[members] = False
                next_color += 1

        # Randomised growth from the W1 window, candidates visited by the W2 rule
        pool = uncolored & (level == i)
        while pool.any():
            idx = np.flatnonzero(pool)
            w1 = idx[k[idx] <= window_upper(k[idx], params.a)]
            v = int(rng.choice(w1))
            rest = idx[idx != v]
            members = np.concatenate([[v], rest[g.code[rest] == g.code[v]]]).astype(np.int64)
            if rest.size and np.count_nonzero(~g.neighbor_mask(v, rest)) + 1 >= i:
                order = window_visit_order(k[rest], params.b, rng)
                members = grow_independent_set(g, v, rest[order])
            if len(members) >= i:
                colors[members] = next_color
                uncolored[members] = False
                pool[members] = False
                next_color += 1
            else:
                # Unreachable at i = 1 since a singleton always qualifies
                assert i > 1
                group = idx[g.code[idx] == g.code[v]]
                pool[group] = False
                level[group] = i - 1
        logger.debug(f"HgLC1 level {i}: {next_color} colors so far, {int(uncolored.sum())} uncolored")

    assert not uncolored.any()
    greedy = Coloring(colors)
    greedy_nu = local_number(g, greedy, validate=False)
    searched = local_search(g, greedy, rng)
    searched_nu = local_number(g, searched, validate=False)
    if searched_nu <= greedy_nu:
        coloring, nu = searched, searched_nu
    else:
        logger.warning(f"LocalSearch raised nu from {greedy_nu} to {searched_nu}; keeping the greedy coloring")
        coloring, nu = greedy, greedy_nu

    elapsed = (time.perf_counter() - start) * 1000
    logger.debug(f"HGLC1: |V|={g.size} colors={coloring.num_colors} nu={nu} ({elapsed:.1f} ms)")
    return ColoringOutcome(coloring, nu, Algorithm.HGLC1, elapsed)


def hglc(
    g: ConflictGraph,
    meta: Optional[Sequence[frozenset]] = None,
    params: HglcParams = HglcParams(),
    seed: SeedLike = None
) -> ColoringOutcome:
    return pick_smaller(hglc1(g, meta, params, seed), gclc2(g))
