import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.coloring import gclc2
from src.conflict_graph.graph import build_conflict_graph
from src.exceptions import InvalidConfigError
from src.network.demand import sample_requests
from src.network.model import DemandRealization
from src.network.placement import rap_place
from src.simulation import (
    ExperimentSpec,
    aggregate,
    cache_size_reduction,
    emit_csv,
    emit_json,
    emit_plot,
    emit_trials_csv,
    run_experiment,
    run_trial,
)
from src.simulation.experiment import AGGREGATE_COLUMNS, TrialRecord
from src.utils.seeding import make_rng

EXPERIMENTS = Path(__file__).resolve().parent.parent / "experiments"


def small_spec(**changes) -> ExperimentSpec:
    doc = {
        "name": "small",
        "network": {"m": 6, "n": 3, "B": 4, "M": 1, "L": 1, "Q": {"zipf": {"gamma": 0.4}}, "P": "uniform"},
        "sweep": {"param": "M", "values": [1, 2, 3]},
        "schemes": ["GCLC", "HGLC"],
        "trials": 4,
        "seed": 5,
    }
    doc.update(changes)
    return ExperimentSpec.from_dict(doc)


def test_example1_experiment() -> None:
    result = run_experiment(ExperimentSpec.from_json(EXPERIMENTS / "example1.json"), workers=1)
    rates = dict(zip(result.aggregates["scheme"], result.aggregates["mean_rate"]))
    assert rates["GCLC2-only"] == pytest.approx(4 / 3)
    assert rates["GCLC"] == pytest.approx(1.0)
    assert rates["HGLC"] == pytest.approx(1.0)
    assert rates["ORACLE"] == pytest.approx(1.0)
    assert rates["LFU-sim"] == pytest.approx(1.0)
    gclc2 = next(r for r in result.records if r.scheme == "GCLC2-only")
    assert (gclc2.vertices, gclc2.edges, gclc2.num_colors, gclc2.nu) == (6, 16, 5, 4)
    assert all(r.decode_ok for r in result.records if r.scheme != "LFU-sim")


def test_full_caches_give_zero_rate() -> None:
    spec = small_spec(sweep={"param": "M", "values": [6]}, schemes=["GCLC", "HGLC", "GCLC2-only", "LFU-sim"])
    result = run_experiment(spec, workers=1)
    assert result.aggregates["mean_rate"].tolist() == [0.0] * 4
    assert {r.vertices for r in result.records if r.scheme != "LFU-sim"} == {0}


def test_aggregate_table_shape_and_order() -> None:
    result = run_experiment(small_spec(), workers=1)
    table = result.aggregates
    assert list(table.columns) == AGGREGATE_COLUMNS
    assert len(table) == 6
    assert table["trials"].tolist() == [4] * 6
    assert table["scheme"].tolist() == ["GCLC", "HGLC"] * 3
    assert (table["ci95_lo"] <= table["mean_rate"]).all()
    assert (table["mean_rate"] <= table["ci95_hi"]).all()


def test_runs_are_reproducible() -> None:
    first = run_experiment(small_spec(), workers=1).records_frame().drop(columns="runtime_ms")
    again = run_experiment(small_spec(), workers=1).records_frame().drop(columns="runtime_ms")
    pd.testing.assert_frame_equal(first, again)


def test_parallel_run_matches_serial() -> None:
    serial = run_experiment(small_spec(), workers=1).aggregates
    parallel = run_experiment(small_spec(), workers=2).aggregates
    pd.testing.assert_frame_equal(serial, parallel)


def test_trial_schemes_share_one_realization() -> None:
    records = run_trial(small_spec(schemes=["GCLC", "HGLC", "GCLC2-only"]), 1, 0)
    assert len({(r.vertices, r.edges) for r in records}) == 1
    baseline = next(r.nu for r in records if r.scheme == "GCLC2-only")
    assert all(r.nu <= baseline for r in records)


def test_trial_realization_is_the_point_trial_stream() -> None:
    spec = small_spec(schemes=["GCLC2-only"])
    config = spec.point_config(spec.sweep_values[2])
    rng = make_rng(spec.seed, 2, 3)
    requests = sample_requests(config, rng)
    cache = rap_place(config, rng)
    g = build_conflict_graph(cache, DemandRealization.from_requests(requests, cache))
    (record,) = run_trial(spec, 2, 3)
    assert (record.vertices, record.edges, record.nu) == (g.size, g.edge_count, gclc2(g).local_number)


def test_hglc_parameter_sweep() -> None:
    spec = small_spec(sweep={"param": "a", "values": [0.0, 1.0]}, schemes=["HGLC"], trials=2)
    assert spec.point_hglc_params(1.0).a == 1.0
    assert spec.point_config(1.0).M.tolist() == [1.0, 1.0, 1.0]
    assert len(run_experiment(spec, workers=1).aggregates) == 2


def test_bound_schemes_are_evaluated_once_per_point() -> None:
    result = run_experiment(small_spec(schemes=["bound-GCLC", "bound-LFU"]), workers=1)
    assert len(result.records) == 6
    assert result.aggregates["trials"].tolist() == [1] * 6
    lfu = result.aggregates[result.aggregates["scheme"] == "bound-LFU"]["mean_rate"].tolist()
    assert lfu == sorted(lfu, reverse=True)


def test_gamma_sweep_rebuilds_demand() -> None:
    spec = small_spec(sweep={"param": "gamma", "values": [0.0, 1.0]})
    assert spec.point_config(0.0).Q[0] == pytest.approx(np.full(6, 1 / 6))
    assert spec.point_config(1.0).Q[0, 0] > spec.point_config(1.0).Q[0, 5]


def test_overrides() -> None:
    spec = small_spec().with_overrides(trials=7, seed=None, a=0.5, verify_coding=False)
    assert spec.trials == 7 and spec.seed == 5
    assert spec.hglc_params.a == 0.5 and spec.hglc_params.b == small_spec().hglc_params.b
    assert spec.verify_coding is False


@pytest.mark.parametrize("changes, field", [
    ({"schemes": ["GCLC", "MAGIC"]}, "schemes[1]"),
    ({"trials": 0}, "trials"),
    ({"sweep": {"param": "color", "values": [1]}}, "sweep.param"),
    ({"sweep": {"param": "M"}}, "sweep"),
    ({"verify_coding": "sometimes"}, "verify_coding"),
])
def test_spec_validation(changes, field) -> None:
    with pytest.raises(InvalidConfigError) as err:
        small_spec(**changes)
    assert err.value.field == field


def test_bad_sweep_value_fails_before_running() -> None:
    with pytest.raises(InvalidConfigError) as err:
        small_spec(sweep={"param": "M", "values": [1, 9]})
    assert "M=9" in str(err.value)


def test_cache_size_reduction() -> None:
    records = [
        TrialRecord("M", 100, "HGLC", 0, 30.0), TrialRecord("M", 200, "HGLC", 0, 19.0),
        TrialRecord("M", 100, "GCLC", 0, 40.0), TrialRecord("M", 200, "GCLC", 0, 35.0),
    ]
    assert cache_size_reduction(aggregate(records), 20.0) == {"HGLC": 200.0, "GCLC": None}


def test_summary_reports_target(tmp_path) -> None:
    result = run_experiment(small_spec(target_rate=100.0), workers=1)
    summary = result.summary()
    assert summary["smallest_value_reaching_target"] == {"GCLC": 1, "HGLC": 1}
    assert summary["verified_trials"] == 24
    emit_json(summary, tmp_path / "summary.json")
    assert json.loads((tmp_path / "summary.json").read_text())["trials"] == 4


def test_artifacts(tmp_path) -> None:
    result = run_experiment(small_spec(), workers=1)
    emit_csv(result.aggregates, tmp_path / "results.csv")
    emit_trials_csv(result.records_frame(), tmp_path / "trials.csv")
    emit_plot(result.aggregates, tmp_path / "rates.svg", title="small")

    table = pd.read_csv(tmp_path / "results.csv")
    assert list(table.columns) == AGGREGATE_COLUMNS
    assert len(table) == 6
    assert len(pd.read_csv(tmp_path / "trials.csv")) == 24
    assert "<svg" in (tmp_path / "rates.svg").read_text()


def test_emit_csv_from_records(tmp_path) -> None:
    records = [TrialRecord("B", 10, "GCLC", t, float(t)) for t in range(3)]
    emit_csv(records, tmp_path / "out.csv")
    row = pd.read_csv(tmp_path / "out.csv").iloc[0]
    assert row["mean_rate"] == pytest.approx(1.0)
    assert row["ci95_hi"] - row["ci95_lo"] == pytest.approx(2 * 1.96 / np.sqrt(3))
    with pytest.raises(ValueError):
        emit_csv([], tmp_path / "empty.csv")
