"""
End-to-end checks at experiment scale. Everything except the Example 1
golden run is marked slow; run with ``pytest -m slow``.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from src.analysis import lfu_rate, rate_bound
from src.coloring import HglcParams, brute_force_oracle, gclc, gclc1, gclc2, hglc, hglc1, validate_coloring
from src.conflict_graph.graph import build_conflict_graph
from src.index_coding import check_mds, galois_field, mds_generator, verify_round_trip
from src.network.demand import sample_requests, zipf_distribution
from src.network.model import DemandRealization, NetworkConfig
from src.network.placement import lfu_place, rap_place
from src.simulation import ExperimentSpec, run_experiment
from src.utils.seeding import make_rng

from tests.conftest import random_instance, tiny_instance

EXPERIMENTS = Path(__file__).resolve().parent.parent / "experiments"


def mean_rates(result):
    return {(row.scheme, row.value): row.mean_rate for row in result.aggregates.itertuples(index=False)}


def test_example1_golden(example1) -> None:
    config, _, _, g = example1
    assert g.size == 6
    out = gclc2(g)
    assert out.num_colors == 5
    assert out.local_number == 4
    assert brute_force_oracle(g).local_number == 3
    assert out.rate(config.B) == pytest.approx(4 / 3)
    assert verify_round_trip(g, out, galois_field(8), seed=0) == 6


@pytest.mark.slow
def test_oracle_dominance() -> None:
    for seed in range(500):
        _, g = tiny_instance(seed)
        exact = brute_force_oracle(g).local_number
        for out in (gclc1(g), gclc2(g), hglc1(g, seed=seed)):
            validate_coloring(g, out.coloring)
            assert out.local_number >= exact


@pytest.mark.slow
def test_end_to_end_decodability() -> None:
    for seed in range(1000):
        _, g = random_instance(seed)
        for out in (gclc(g), gclc2(g), hglc(g, seed=seed)):
            assert verify_round_trip(g, out, seed=seed) == g.size


@pytest.mark.slow
def test_every_coloring_variant_decodes() -> None:
    for seed in range(3000):
        _, g = random_instance(10_000 + seed, max_n=8, max_m=6, max_B=6)
        variants = (
            gclc1(g),
            gclc1(g, grouping="set"),
            hglc1(g, seed=seed),
            hglc1(g, params=HglcParams(1, 1), seed=seed),
        )
        for out in variants:
            assert verify_round_trip(g, out, seed=seed) == g.size


@pytest.mark.slow
def test_mds_property_over_gf16() -> None:
    field = galois_field(16)
    for chi in range(1, 17):
        for nu in range(1, min(chi, 8) + 1):
            assert check_mds(mds_generator(chi, nu, field), exhaustive_limit=math.comb(16, 8))


@pytest.mark.slow
def test_hglc_beats_gclc1_on_average() -> None:
    config = NetworkConfig.homogeneous(m=20, n=8, B=40, M=5, gamma=0.4)
    gclc_nu, hglc_nu = [], []
    for seed in range(200):
        rng = make_rng(seed)
        requests = sample_requests(config, rng)
        cache = rap_place(config, rng)
        g = build_conflict_graph(cache, DemandRealization.from_requests(requests, cache))
        gclc_nu.append(gclc1(g).local_number)
        hglc_nu.append(hglc1(g, seed=seed).local_number)
    assert np.mean(hglc_nu) <= np.mean(gclc_nu)


@pytest.mark.slow
def test_bound_convergence() -> None:
    spec = ExperimentSpec.from_json(EXPERIMENTS / "bound_convergence.json")
    result = run_experiment(spec)
    rates = mean_rates(result)
    r_gclc = rate_bound(spec.point_config(2000)).r_gclc
    assert 0.85 * r_gclc <= rates[("GCLC", 2000)] <= 1.15 * r_gclc
    assert rates[("GCLC", 50)] > rates[("bound-GCLC", 50)]


@pytest.fixture(scope="module")
def single_request():
    return run_experiment(ExperimentSpec.from_json(EXPERIMENTS / "single_request.json"))


@pytest.fixture(scope="module")
def helper_nodes():
    return run_experiment(ExperimentSpec.from_json(EXPERIMENTS / "helper_nodes.json"))


@pytest.mark.slow
def test_single_request_headline(single_request) -> None:
    rates = mean_rates(single_request)
    assert 0.4 <= rates[("HGLC", 400)] / rates[("HGLC", 200)] <= 0.6
    assert rates[("LFU-sim", 500)] / rates[("HGLC", 500)] >= 3.5
    for M in (100, 200, 300, 400, 500):
        assert rates[("HGLC", M)] <= rates[("GCLC", M)]


@pytest.mark.slow
def test_helper_nodes_ordering(single_request, helper_nodes) -> None:
    table = helper_nodes.aggregates.set_index(["scheme", "value"])
    for M in (100, 200, 300, 400, 500):
        assert table.loc[("HGLC", M), "mean_rate"] <= table.loc[("GCLC", M), "mean_rate"]
        assert table.loc[("GCLC", M), "mean_rate"] <= table.loc[("LFU-sim", M), "mean_rate"]
    a, b = mean_rates(single_request), mean_rates(helper_nodes)
    assert b[("LFU-sim", 500)] / b[("HGLC", 500)] < a[("LFU-sim", 500)] / a[("HGLC", 500)]


@pytest.mark.slow
def test_lfu_formula_against_simulation() -> None:
    rng = make_rng(99)
    for _ in range(10):
        n, m = int(rng.integers(2, 9)), int(rng.integers(5, 51))
        doc = {
            "m": m, "n": n, "B": 1,
            "M": rng.integers(0, m // 2 + 1, size=n).tolist(),
            "L": rng.integers(1, 4, size=n).tolist(),
            "Q": [zipf_distribution(m, g).tolist() for g in rng.uniform(0, 1.2, size=n)],
        }
        config = NetworkConfig.from_dict(doc)
        cached = lfu_place(config).cached[:, :, 0]
        misses = np.array([
            len({f for u, files in enumerate(sample_requests(config, rng)) for f in files if not cached[u, f]})
            for _ in range(10_000)
        ])
        sigma = misses.std(ddof=1) / math.sqrt(len(misses))
        assert abs(misses.mean() - lfu_rate(config.Q, config.M, config.L)) <= 3 * sigma + 1e-9


@pytest.mark.slow
def test_coloring_time_scales_quadratically() -> None:
    timings = {"gclc1": [], "hglc1": []}
    for B in (134, 267, 534, 1067):
        config = NetworkConfig.homogeneous(m=100, n=10, B=B, M=25, gamma=0.4)
        rng = make_rng(B)
        requests = sample_requests(config, rng)
        cache = rap_place(config, rng)
        g = build_conflict_graph(cache, DemandRealization.from_requests(requests, cache))
        for name, run in (("gclc1", lambda: gclc1(g)), ("hglc1", lambda: hglc1(g, seed=0))):
            start = time.perf_counter()
            run()
            timings[name].append(time.perf_counter() - start)
    for name, series in timings.items():
        for small, large in zip(series, series[1:]):
            assert large / small <= 5.5, f"{name}: {series}"
