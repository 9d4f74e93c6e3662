"""
Deterministic sub-seeding for Monte Carlo trials.

Every random stream is a numpy Generator built from a SeedSequence whose
spawn key is the tuple of indices that identifies the stream, so trials can
run in any order (or in parallel) and still reproduce bit-for-bit.
"""

from typing import Union

import numpy as np

SeedLike = Union[None, int, np.random.Generator, np.random.SeedSequence]


def make_rng(seed: SeedLike = None, *indices: int) -> np.random.Generator:
    """Generator for the stream (seed, *indices)."""
    if isinstance(seed, np.random.Generator):
        if indices:
            raise ValueError("indices cannot be combined with an existing Generator")
        return seed
    if isinstance(seed, np.random.SeedSequence):
        base = seed
        seq = np.random.SeedSequence(base.entropy, spawn_key=tuple(base.spawn_key) + tuple(int(i) for i in indices))
        return np.random.default_rng(seq)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(i) for i in indices)))
