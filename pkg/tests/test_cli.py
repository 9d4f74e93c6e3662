import json
import os
import sys
from pathlib import Path

import pandas as pd
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'scripts'))
import coded_caching  # noqa: E402

from src.exceptions import InvariantBreachError

EXPERIMENTS = Path(__file__).resolve().parent.parent / "experiments"


@pytest.fixture(autouse=True)
def _in_tmp_dir(tmp_path, monkeypatch):
    # The CLI attaches its log file relative to the working directory
    monkeypatch.chdir(tmp_path)


def test_simulate_writes_all_artifacts(tmp_path) -> None:
    out = tmp_path / "run"
    code = coded_caching.main(["simulate", "--config", str(EXPERIMENTS / "example1.json"), "--out", str(out), "--workers", "1"])
    assert code == 0
    for name in ("results.csv", "trials.csv", "rates.svg", "summary.json"):
        assert (out / name).exists()
    table = pd.read_csv(out / "results.csv")
    assert dict(zip(table["scheme"], table["mean_rate"]))["GCLC2-only"] == pytest.approx(4 / 3)


def test_simulate_overrides(tmp_path) -> None:
    out = tmp_path / "run"
    code = coded_caching.main(["simulate", "--config", str(EXPERIMENTS / "example1.json"), "--out", str(out),
                               "--trials", "2", "--a", "0", "--b", "1", "--verify-coding", "off", "--workers", "1"])
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["trials"] == 2
    assert summary["hglc_params"] == {"a": 0.0, "b": 1.0}
    assert summary["verified_trials"] == 0


def test_analyze_network(tmp_path, capsys) -> None:
    net = tmp_path / "net.json"
    net.write_text(json.dumps({"m": 10, "n": 4, "B": 1, "M": 2, "L": 1, "Q": {"zipf": {"gamma": 0.4}}}))
    code = coded_caching.main(["analyze", "--config", str(net), "--optimize", "--out", str(tmp_path / "bound.json")])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["r_gclc"] == pytest.approx(min(report["psi"], report["m_bar"] - report["M_bar"]))
    assert report["optimized"]["r_gclc"] <= report["r_gclc"] + 1e-12
    assert json.loads((tmp_path / "bound.json").read_text()) == report


def test_analyze_experiment_reports_every_point(capsys) -> None:
    code = coded_caching.main(["analyze", "--config", str(EXPERIMENTS / "bound_convergence.json")])
    assert code == 0
    reports = json.loads(capsys.readouterr().out)
    assert [r["point"] for r in reports] == ["B=50", "B=2000"]


def test_oracle_on_fixed_realization(tmp_path, capsys) -> None:
    dimacs = tmp_path / "graph.dimacs"
    code = coded_caching.main(["oracle", "--config", str(EXPERIMENTS / "example1.json"), "--dimacs", str(dimacs),
                               "--coloring-out", str(tmp_path / "best.txt")])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    nus = {r["algorithm"]: r["local_number"] for r in report["results"]}
    assert nus == {"GCLC1": 3, "GCLC2": 4, "HGLC1": 3, "ORACLE": 3}
    assert dimacs.read_text().startswith("p 6 16")
    assert len((tmp_path / "best.txt").read_text().splitlines()) == 6


def test_oracle_size_guard_is_a_config_error(tmp_path) -> None:
    code = coded_caching.main(["oracle", "--config", str(EXPERIMENTS / "example1.json"), "--vertices", "3"])
    assert code == 2


def test_malformed_json_exits_with_config_error(tmp_path) -> None:
    bad = tmp_path / "bad.json"
    bad.write_text('{"network": ')
    assert coded_caching.main(["simulate", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2


def test_unknown_scheme_exits_with_config_error(tmp_path) -> None:
    doc = json.loads((EXPERIMENTS / "example1.json").read_text())
    doc["schemes"] = ["GCLC", "NOPE"]
    path = tmp_path / "exp.json"
    path.write_text(json.dumps(doc))
    assert coded_caching.main(["simulate", "--config", str(path), "--out", str(tmp_path / "o")]) == 2


def test_invariant_breach_exit_code(tmp_path, monkeypatch) -> None:
    def breach(spec, workers=None):
        raise InvariantBreachError("forced")

    monkeypatch.setattr(coded_caching, "run_experiment", breach)
    code = coded_caching.main(["simulate", "--config", str(EXPERIMENTS / "example1.json"), "--out", str(tmp_path / "o")])
    assert code == 3
