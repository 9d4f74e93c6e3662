import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.conflict_graph.graph import build_conflict_graph
from src.network.demand import sample_requests
from src.network.model import CacheRealization, DemandRealization, NetworkConfig
from src.network.placement import rap_place
from src.utils.seeding import make_rng


def example1_parts():
    """Three users, files A, B, C in three packets; user u caches packet u of every file."""
    config = NetworkConfig.homogeneous(m=3, n=3, B=3, M=1)
    cache = CacheRealization.from_sets({(u, f): [u] for u in range(3) for f in range(3)}, 3, 3, 3)
    demand = DemandRealization.from_requests([[0], [0], [1]], cache)
    return config, cache, demand


@pytest.fixture
def example1():
    config, cache, demand = example1_parts()
    return config, cache, demand, build_conflict_graph(cache, demand)


@pytest.fixture
def example1_graph(example1):
    return example1[3]


def random_instance(seed: int, max_n: int = 6, max_m: int = 10, max_B: int = 8):
    """Seeded random (config, graph) with n <= max_n, m <= max_m, B <= max_B."""
    rng = make_rng(seed)
    n = int(rng.integers(1, max_n + 1))
    m = int(rng.integers(1, max_m + 1))
    B = int(rng.integers(1, max_B + 1))
    M = float(rng.integers(0, m + 1))
    L = int(rng.integers(1, min(3, m) + 1))
    config = NetworkConfig.homogeneous(m=m, n=n, B=B, M=M, L=L, gamma=float(rng.uniform(0, 1)))
    requests = sample_requests(config, rng)
    cache = rap_place(config, rng)
    return config, build_conflict_graph(cache, DemandRealization.from_requests(requests, cache))


def tiny_instance(seed: int, max_vertices: int = 10):
    """Random instance whose conflict graph has between 1 and ``max_vertices`` vertices."""
    attempt = 0
    while True:
        config, g = random_instance(seed * 1000 + attempt, max_n=4, max_m=4, max_B=4)
        if 0 < g.size <= max_vertices:
            return config, g
        attempt += 1


@pytest.fixture
def random_graphs():
    return [random_instance(s)[1] for s in range(40)]
