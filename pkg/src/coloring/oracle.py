"""
Exact local chromatic number for tiny conflict graphs.

Branch-and-bound over set partitions of the packet groups into independent
sets; vertices requesting one packet always share a color, as the codec needs.
Groups are placed in order of their lowest vertex id and may only open the
next unused color, so every partition is visited once. The colors already
visible inside each closed out-neighbourhood bound the final local number
from below.
"""

import time
from typing import Dict, List

import numpy as np

from config import ORACLE_MAX_VERTICES
from src.conflict_graph.graph import ConflictGraph, closed_out_neighborhood
from src.exceptions import GraphTooLargeError
from src.utils.logger import logger

from .gclc import gclc1, gclc2, pick_smaller
from .outcome import Algorithm, Coloring, ColoringOutcome, local_number


def brute_force_oracle(g: ConflictGraph, max_vertices: int = ORACLE_MAX_VERTICES) -> ColoringOutcome:
    if g.size > max_vertices:
        raise GraphTooLargeError(f"oracle limited to {max_vertices} vertices, graph has {g.size}")
    start = time.perf_counter()
    size = g.size
    if size == 0:
        return ColoringOutcome(Coloring(np.empty(0, dtype=np.int64)), 0, Algorithm.ORACLE, 0.0)

    adjacency = np.array([g.neighbor_mask(v) for v in range(size)])
    closed = [closed_out_neighborhood(g, v) for v in range(size)]
    # watchers[w]: vertices whose closed out-neighbourhood contains w
    watchers = [[v for v in range(size) if w in closed[v]] for w in range(size)]
    units = sorted((grp.tolist() for grp in g.packet_groups), key=min)
    unit_adjacency = [adjacency[unit].any(axis=0) for unit in units]

    incumbent = pick_smaller(gclc1(g), gclc2(g))
    best_nu = incumbent.local_number
    best_colors = incumbent.coloring.color_of.copy()

    colors = np.full(size, -1, dtype=np.int64)
    classes: List[List[int]] = []
    seen: List[Dict[int, int]] = [{} for _ in range(size)]
    explored = 0

    def place(unit: List[int], c: int, delta: int):
        for w in unit:
            for v in watchers[w]:
                left = seen[v].get(c, 0) + delta
                if left:
                    seen[v][c] = left
                else:
                    del seen[v][c]

    def search(i: int):
        nonlocal best_nu, best_colors, explored
        explored += 1
        if i == len(units):
            nu = max(len(s) for s in seen)
            if nu < best_nu:
                best_nu, best_colors = nu, colors.copy()
            return
        unit = units[i]
        options = [c for c, members in enumerate(classes) if not unit_adjacency[i][members].any()]
        options.append(len(classes))
        for c in options:
            if c == len(classes):
                classes.append(list(unit))
            else:
                classes[c].extend(unit)
            colors[unit] = c
            place(unit, c, 1)
            if max(len(s) for s in seen) < best_nu:
                search(i + 1)
            place(unit, c, -1)
            colors[unit] = -1
            if len(classes[c]) == len(unit):
                classes.pop()
            else:
                del classes[c][-len(unit):]

    search(0)

    coloring = Coloring.compact(best_colors)
    nu = local_number(g, coloring)
    elapsed = (time.perf_counter() - start) * 1000
    logger.debug(f"ORACLE: |V|={size} nu={nu} after {explored} nodes ({elapsed:.1f} ms)")
    return ColoringOutcome(coloring, nu, Algorithm.ORACLE, elapsed)
