"""
Experiment Runner
Seeded Monte Carlo trials over a parameter sweep:
place -> demand -> conflict graph -> color -> code -> verify,
aggregated into mean rates with normal-approximation confidence intervals.
"""

import copy
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from config import CI_MIN_TRIALS, GCLC1_GROUPING, ORACLE_MAX_VERTICES, VERIFY_CODING_MAX_VERTICES, worker_count
from src.analysis.bounds import rate_bound
from src.coloring import HglcParams, brute_force_oracle, gclc, gclc2, hglc, validate_coloring
from src.conflict_graph.graph import build_conflict_graph
from src.exceptions import (
    ColoringValidityError,
    DecodeError,
    GraphTooLargeError,
    InvalidConfigError,
    InvariantBreachError,
)
from src.index_coding.codec import verify_round_trip
from src.network.demand import sample_requests
from src.network.model import DemandRealization, NetworkConfig, load_json_document, realization_from_dict
from src.network.placement import lfu_place, rap_place
from src.utils.logger import logger
from src.utils.seeding import make_rng

COLORING_SCHEMES = ("GCLC", "HGLC", "GCLC2-only", "ORACLE")
SIMULATED_SCHEMES = COLORING_SCHEMES + ("LFU-sim",)
BOUND_SCHEMES = ("bound-GCLC", "bound-LFU")
ALL_SCHEMES = SIMULATED_SCHEMES + BOUND_SCHEMES

NETWORK_PARAMS = ("M", "B", "L", "n", "m", "gamma")
HGLC_PARAMS = ("a", "b")

AGGREGATE_COLUMNS = ["sweep_param", "value", "scheme", "mean_rate", "ci95_lo", "ci95_hi", "trials"]
Z_95 = 1.96


@dataclass(frozen=True)
class ExperimentSpec:
    network: Dict[str, Any]
    sweep_param: str
    sweep_values: Tuple[float, ...]
    schemes: Tuple[str, ...]
    trials: int = 1
    seed: int = 0
    hglc_params: HglcParams = field(default_factory=HglcParams)
    # None: on while |V| stays within verify_coding_max_vertices
    verify_coding: Optional[bool] = None
    gclc_grouping: str = GCLC1_GROUPING
    target_rate: Optional[float] = None
    name: str = "experiment"
    # Fixed (C, requests) used by every trial instead of sampling
    realization: Optional[Dict[str, Any]] = None

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidConfigError("must be >= 1", field="trials")
        if not self.sweep_values:
            raise InvalidConfigError("sweep needs at least one value", field="sweep.values")
        if self.sweep_param not in NETWORK_PARAMS + HGLC_PARAMS:
            raise InvalidConfigError(
                f"unknown sweep parameter {self.sweep_param!r}; expected one of {NETWORK_PARAMS + HGLC_PARAMS}",
                field="sweep.param")
        if not self.schemes:
            raise InvalidConfigError("at least one scheme is required", field="schemes")
        for i, tag in enumerate(self.schemes):
            if tag not in ALL_SCHEMES:
                raise InvalidConfigError(f"unrecognized scheme {tag!r}; expected one of {ALL_SCHEMES}", field=f"schemes[{i}]")
        if self.gclc_grouping not in ("cardinality", "set"):
            raise InvalidConfigError(f"unknown grouping {self.gclc_grouping!r}", field="gclc_grouping")

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> 'ExperimentSpec':
        if "network" not in doc:
            raise InvalidConfigError("missing required field", field="network")
        sweep = doc.get("sweep") or {}
        if "param" not in sweep or "values" not in sweep:
            raise InvalidConfigError("sweep needs 'param' and 'values'", field="sweep")
        hp = doc.get("hglc_params", {})
        spec = cls(
            network=dict(doc["network"]),
            sweep_param=str(sweep["param"]),
            sweep_values=tuple(sweep["values"]),
            schemes=tuple(doc.get("schemes", ("GCLC", "HGLC", "LFU-sim"))),
            trials=int(doc.get("trials", 1)),
            seed=int(doc.get("seed", 0)),
            hglc_params=HglcParams(a=float(hp.get("a", HglcParams.a)), b=float(hp.get("b", HglcParams.b))),
            verify_coding=_parse_switch(doc.get("verify_coding"), "verify_coding"),
            gclc_grouping=doc.get("gclc_grouping", GCLC1_GROUPING),
            target_rate=None if doc.get("target_rate") is None else float(doc["target_rate"]),
            name=str(doc.get("name", "experiment")),
            realization=doc.get("realization"),
        )
        # Fail on a bad network template before any trial runs
        for value in spec.sweep_values:
            config = spec.point_config(value)
            if spec.realization is not None:
                realization_from_dict(spec.realization, config)
        return spec

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> 'ExperimentSpec':
        return cls.from_dict(load_json_document(path))

    def with_overrides(self, **changes) -> 'ExperimentSpec':
        """Apply CLI overrides (None means keep)."""
        changes = {k: v for k, v in changes.items() if v is not None}
        a, b = changes.pop("a", None), changes.pop("b", None)
        if a is not None or b is not None:
            changes["hglc_params"] = HglcParams(
                a=self.hglc_params.a if a is None else a,
                b=self.hglc_params.b if b is None else b,
            )
        return replace(self, **changes)

    def point_config(self, value) -> NetworkConfig:
        doc = copy.deepcopy(self.network)
        if self.sweep_param == "gamma":
            doc["Q"] = {"zipf": {"gamma": float(value)}}
        elif self.sweep_param in NETWORK_PARAMS:
            doc[self.sweep_param] = value
        try:
            return NetworkConfig.from_dict(doc)
        except InvalidConfigError as e:
            raise InvalidConfigError(f"at {self.sweep_param}={value}: {e}", field=f"network.{e.field}" if e.field else "network")

    def point_hglc_params(self, value) -> HglcParams:
        if self.sweep_param in HGLC_PARAMS:
            return replace(self.hglc_params, **{self.sweep_param: float(value)})
        return self.hglc_params

    @property
    def simulated_schemes(self) -> Tuple[str, ...]:
        return tuple(s for s in self.schemes if s in SIMULATED_SCHEMES)

    @property
    def bound_schemes(self) -> Tuple[str, ...]:
        return tuple(s for s in self.schemes if s in BOUND_SCHEMES)


def _parse_switch(value, name: str) -> Optional[bool]:
    if value is None or value == "auto":
        return None
    if isinstance(value, bool):
        return value
    if value in ("on", "off"):
        return value == "on"
    raise InvalidConfigError(f"expected on/off/auto, got {value!r}", field=name)


@dataclass(frozen=True)
class TrialRecord:
    sweep_param: str
    value: float
    scheme: str
    trial: int
    rate: float
    nu: Optional[int] = None
    num_colors: Optional[int] = None
    vertices: Optional[int] = None
    edges: Optional[int] = None
    runtime_ms: float = 0.0
    decode_ok: Optional[bool] = None


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    records: List[TrialRecord]
    aggregates: pd.DataFrame
    workers: int = 1
    elapsed_s: float = 0.0

    def records_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(r) for r in self.records])

    def summary(self) -> Dict[str, Any]:
        verified = [r.decode_ok for r in self.records if r.scheme in COLORING_SCHEMES]
        out = {
            "name": self.spec.name,
            "sweep_param": self.spec.sweep_param,
            "sweep_values": list(self.spec.sweep_values),
            "schemes": list(self.spec.schemes),
            "trials": self.spec.trials,
            "seed": self.spec.seed,
            "hglc_params": {"a": self.spec.hglc_params.a, "b": self.spec.hglc_params.b},
            "workers": self.workers,
            "elapsed_s": round(self.elapsed_s, 3),
            "verified_trials": sum(1 for ok in verified if ok),
            "unverified_trials": sum(1 for ok in verified if ok is None),
            "mean_rates": {
                scheme: dict(zip(grp["value"].tolist(), grp["mean_rate"].tolist()))
                for scheme, grp in self.aggregates.groupby("scheme", sort=False)
            },
        }
        if self.spec.target_rate is not None:
            out["target_rate"] = self.spec.target_rate
            out["smallest_value_reaching_target"] = cache_size_reduction(self.aggregates, self.spec.target_rate)
        return out


# ----------------------------------------------------------------------
# One trial
# ----------------------------------------------------------------------

def _lfu_rate(config: NetworkConfig, requests: Sequence[Sequence[int]]) -> float:
    """Distinct requested files missing from at least one requester's LFU cache."""
    cached = lfu_place(config).cached[:, :, 0]
    missing = {int(f) for u, files in enumerate(requests) for f in files if not cached[u, f]}
    return float(len(missing))


def _color(scheme: str, g, params: HglcParams, grouping: str, seed):
    if scheme == "GCLC":
        return gclc(g, grouping=grouping)
    if scheme == "HGLC":
        return hglc(g, params=params, seed=seed)
    if scheme == "GCLC2-only":
        return gclc2(g)
    if g.size > ORACLE_MAX_VERTICES:
        raise GraphTooLargeError(f"ORACLE scheme needs graphs of at most {ORACLE_MAX_VERTICES} vertices, trial produced {g.size}")
    return brute_force_oracle(g)


def run_trial(spec: ExperimentSpec, point: int, trial: int) -> List[TrialRecord]:
    """Every simulated scheme on one shared (C, W) realization."""
    value = spec.sweep_values[point]
    config = spec.point_config(value)
    params = spec.point_hglc_params(value)
    rng = make_rng(spec.seed, point, trial)
    if spec.realization is not None:
        fixed_cache, requests = realization_from_dict(spec.realization, config)
    else:
        fixed_cache, requests = None, sample_requests(config, rng)
    records: List[TrialRecord] = []

    coloring_schemes = [s for s in spec.simulated_schemes if s in COLORING_SCHEMES]
    if coloring_schemes:
        cache = fixed_cache if fixed_cache is not None else rap_place(config, rng)
        g = build_conflict_graph(cache, DemandRealization.from_requests(requests, cache))
        edges = g.edge_count
        verify = spec.verify_coding if spec.verify_coding is not None else g.size <= VERIFY_CODING_MAX_VERTICES
        logger.debug(f"point {point} trial {trial}: |V|={g.size} |E|={edges} verify={verify}")
        baseline = None

        for s_idx, scheme in enumerate(spec.schemes):
            if scheme not in coloring_schemes:
                continue
            outcome = _color(scheme, g, params, spec.gclc_grouping, make_rng(spec.seed, point, trial, s_idx))
            if scheme in ("GCLC", "HGLC"):
                baseline = baseline or gclc2(g)
                if outcome.local_number > baseline.local_number:
                    raise InvariantBreachError(
                        f"{scheme} nu={outcome.local_number} exceeds GCLC2 nu={baseline.local_number} "
                        f"at {spec.sweep_param}={value}, trial {trial}")
            decode_ok = None
            if verify:
                try:
                    validate_coloring(g, outcome.coloring)
                    verify_round_trip(g, outcome, seed=make_rng(spec.seed, point, trial, s_idx, 1))
                except (ColoringValidityError, DecodeError) as e:
                    raise InvariantBreachError(f"{scheme} at {spec.sweep_param}={value}, trial {trial}: {e}") from e
                decode_ok = True
            records.append(TrialRecord(
                sweep_param=spec.sweep_param, value=value, scheme=scheme, trial=trial,
                rate=outcome.rate(config.B), nu=outcome.local_number, num_colors=outcome.num_colors,
                vertices=g.size, edges=edges, runtime_ms=outcome.runtime_ms, decode_ok=decode_ok,
            ))

    if "LFU-sim" in spec.schemes:
        start = time.perf_counter()
        rate = _lfu_rate(config, requests)
        records.append(TrialRecord(
            sweep_param=spec.sweep_param, value=value, scheme="LFU-sim", trial=trial, rate=rate,
            runtime_ms=(time.perf_counter() - start) * 1000,
        ))
    return records


def _run_task(task: Tuple[ExperimentSpec, int, int]) -> List[TrialRecord]:
    return run_trial(*task)


def bound_records(spec: ExperimentSpec, point: int) -> List[TrialRecord]:
    if not spec.bound_schemes:
        return []
    value = spec.sweep_values[point]
    bound = rate_bound(spec.point_config(value), seed=make_rng(spec.seed, point, spec.trials))
    rates = {"bound-GCLC": bound.r_gclc, "bound-LFU": bound.r_lfu}
    return [
        TrialRecord(sweep_param=spec.sweep_param, value=value, scheme=s, trial=0, rate=float(rates[s]))
        for s in spec.bound_schemes
    ]


# ----------------------------------------------------------------------
# Aggregation
# ----------------------------------------------------------------------

def aggregate(records: Sequence[TrialRecord]) -> pd.DataFrame:
    """Mean rate and 95% normal-approximation CI per (sweep value, scheme)."""
    if not records:
        return pd.DataFrame(columns=AGGREGATE_COLUMNS)
    frame = pd.DataFrame([asdict(r) for r in records])
    grouped = frame.groupby(["sweep_param", "value", "scheme"], sort=False)["rate"]
    table = grouped.agg(mean_rate="mean", std="std", trials="count").reset_index()
    half = Z_95 * table["std"].fillna(0.0) / np.sqrt(table["trials"])
    table["ci95_lo"] = table["mean_rate"] - half
    table["ci95_hi"] = table["mean_rate"] + half
    return table[AGGREGATE_COLUMNS]


def cache_size_reduction(aggregates: pd.DataFrame, target_rate: float) -> Dict[str, Optional[float]]:
    """Per scheme, the smallest swept value whose mean rate is at or below ``target_rate``."""
    out = {}
    for scheme, grp in aggregates.groupby("scheme", sort=False):
        hits = grp.loc[grp["mean_rate"] <= target_rate + 1e-12, "value"]
        out[scheme] = None if hits.empty else float(hits.min())
    return out


def run_experiment(spec: ExperimentSpec, workers: Optional[int] = None) -> ExperimentResult:
    workers = workers or worker_count()
    start = time.perf_counter()
    tasks = [(spec, p, t) for p in range(len(spec.sweep_values)) for t in range(spec.trials)]
    logger.info(f"Running '{spec.name}': {len(spec.sweep_values)} points x {spec.trials} trials, "
                f"schemes {list(spec.schemes)}, {workers} workers")
    if spec.trials < CI_MIN_TRIALS:
        logger.warning(f"{spec.trials} trials is below {CI_MIN_TRIALS}; confidence intervals are rough")

    if not spec.simulated_schemes:
        trial_records: List[List[TrialRecord]] = []
    elif workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            trial_records = list(executor.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        trial_records = [_run_task(t) for t in tasks]

    order = {s: i for i, s in enumerate(spec.schemes)}
    records: List[TrialRecord] = []
    for p in range(len(spec.sweep_values)):
        point_records = [r for batch in trial_records[p * spec.trials:(p + 1) * spec.trials] for r in batch]
        point_records.extend(bound_records(spec, p))
        point_records.sort(key=lambda r: (order[r.scheme], r.trial))
        records.extend(point_records)

    unverified = sum(1 for r in records if r.scheme in COLORING_SCHEMES and r.decode_ok is None)
    if unverified and spec.verify_coding is None:
        logger.warning(f"coding verification skipped on {unverified} trials above {VERIFY_CODING_MAX_VERTICES} vertices")

    table = aggregate(records)
    for row in table.itertuples(index=False):
        logger.info(f"{row.sweep_param}={row.value} {row.scheme}: mean rate {row.mean_rate:.4f} "
                    f"[{row.ci95_lo:.4f}, {row.ci95_hi:.4f}] over {row.trials} trials")
    elapsed = time.perf_counter() - start
    logger.info(f"Finished '{spec.name}' in {elapsed:.1f}s")
    return ExperimentResult(spec, records, table, workers, elapsed)
