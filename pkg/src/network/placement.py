"""
Cache Placement
Random popularity-based caching (RAP) and the LFU baseline.
"""

import numpy as np

from src.exceptions import InvalidConfigError
from src.utils.seeding import SeedLike, make_rng

from .model import SUM_TOLERANCE, CacheRealization, NetworkConfig


def apportion(targets: np.ndarray, total: int) -> np.ndarray:
    """
    Largest-remainder (Hamilton) rounding of ``targets`` to integers summing
    to ``total``. Ties in the remainder go to the lower index.
    """
    targets = np.asarray(targets, dtype=float)
    floors = np.floor(targets + SUM_TOLERANCE).astype(int)
    short = int(total) - int(floors.sum())
    if short > 0:
        remainders = targets - floors
        order = np.lexsort((np.arange(len(targets)), -remainders))
        floors[order[:short]] += 1
    return floors


def rap_counts(config: NetworkConfig) -> np.ndarray:
    """|C_{u,f}| for every (u, f): apportioned p_{f,u} * M_u * B."""
    over = config.P * config.M[:, None] > 1.0 + SUM_TOLERANCE
    if np.any(over):
        u, f = (int(x) for x in np.argwhere(over)[0])
        raise InvalidConfigError(f"p[{u},{f}] exceeds 1/M_u", field="P")

    counts = np.zeros((config.n, config.m), dtype=int)
    for u in range(config.n):
        budget = int(np.floor(config.M[u] * config.B + SUM_TOLERANCE))
        if budget == 0:
            continue
        counts[u] = apportion(config.P[u] * config.M[u] * config.B, budget)
    return np.minimum(counts, config.B)


def rap_place(config: NetworkConfig, seed: SeedLike = None) -> CacheRealization:
    """Each user caches its apportioned count of distinct packets of every file, uniformly at random."""
    rng = make_rng(seed)
    counts = rap_counts(config)
    cached = np.zeros((config.n, config.m, config.B), dtype=bool)
    for u in range(config.n):
        for f in np.flatnonzero(counts[u]):
            picks = rng.choice(config.B, size=int(counts[u, f]), replace=False)
            cached[u, f, picks] = True
    return CacheRealization(cached)


def popular_files(q: np.ndarray, M: float) -> np.ndarray:
    """The floor(M) most popular files under q, ties to the lower index."""
    k = int(np.floor(M + SUM_TOLERANCE))
    order = np.argsort(-np.asarray(q), kind="stable")
    return np.sort(order[:k])


def lfu_files(config: NetworkConfig, u: int) -> np.ndarray:
    return popular_files(config.Q[u], config.M[u])


def lfu_place(config: NetworkConfig) -> CacheRealization:
    """Whole-file caching of each user's most popular files."""
    cached = np.zeros((config.n, config.m, config.B), dtype=bool)
    for u in range(config.n):
        cached[u, lfu_files(config, u), :] = True
    return CacheRealization(cached)
