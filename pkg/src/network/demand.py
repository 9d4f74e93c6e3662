"""
Demand Model
Zipf popularity and i.i.d. per-user request sampling.
"""

import numpy as np

from src.exceptions import InvalidConfigError
from src.utils.seeding import SeedLike, make_rng

from .model import CacheRealization, DemandRealization, NetworkConfig


def zipf_distribution(m: int, gamma: float) -> np.ndarray:
    """
    Zipf PMF over files 1..m: q_f = f^-gamma / sum_j j^-gamma.
    gamma = 0 is uniform.
    """
    if m < 1:
        raise InvalidConfigError("zipf needs at least one file", field="m")
    if gamma < 0:
        raise InvalidConfigError("zipf exponent must be >= 0", field="gamma")
    ranks = np.arange(1, m + 1, dtype=np.float64)
    weights = np.power(ranks, -float(gamma))
    # Sum smallest terms first
    return weights / np.sum(weights[::-1])


def sample_requests(config: NetworkConfig, seed: SeedLike = None) -> list:
    """Raw request vectors: L_u i.i.d. draws from row Q[u] for each user."""
    rng = make_rng(seed)
    return [
        rng.choice(config.m, size=int(config.L[u]), replace=True, p=config.Q[u]).tolist()
        for u in range(config.n)
    ]


def sample_demands(config: NetworkConfig, seed: SeedLike, cache: CacheRealization) -> DemandRealization:
    """
    Draw every user's requests and derive W_{u,f} against ``cache``.
    Repeated requests by one user collapse to a single request.
    """
    if cache.n != config.n or cache.m != config.m or cache.B != config.B:
        raise InvalidConfigError(
            f"cache realization shape {cache.cached.shape} does not match config (n={config.n}, m={config.m}, B={config.B})")
    return DemandRealization.from_requests(sample_requests(config, seed), cache)
