#!/usr/bin/env python3
"""
Coded Caching Toolkit CLI

  simulate  run an experiment JSON and write results.csv, trials.csv, rates.svg, summary.json
  analyze   evaluate the asymptotic GCLC and LFU rate bounds for a network or experiment JSON
  oracle    exact local chromatic number of one small conflict graph, next to the heuristics

Exit codes: 0 success, 2 configuration error, 3 invariant breach.
"""
import argparse
import json
import os
import sys
from pathlib import Path

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))
from config import ORACLE_MAX_VERTICES
from src.analysis.bounds import RateBoundCalculator, optimize_caching_distribution
from src.coloring import HglcParams, brute_force_oracle, gclc1, gclc2, hglc1
from src.conflict_graph.graph import build_conflict_graph
from src.exceptions import (
    CodedCachingError,
    ColoringValidityError,
    DecodeError,
    InvariantBreachError,
)
from src.index_coding.codec import verify_round_trip
from src.network.demand import sample_requests
from src.network.model import DemandRealization, NetworkConfig, load_json_document, realization_from_dict
from src.network.placement import rap_place
from src.simulation import ExperimentSpec, emit_csv, emit_json, emit_plot, emit_trials_csv, run_experiment
from src.utils.logger import add_file_sink, logger
from src.utils.seeding import make_rng

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3


def cmd_simulate(args) -> int:
    spec = ExperimentSpec.from_json(args.config).with_overrides(
        trials=args.trials,
        seed=args.seed,
        a=args.a,
        b=args.b,
        verify_coding=None if args.verify_coding == "auto" else args.verify_coding == "on",
        gclc_grouping=args.gclc_grouping,
    )
    result = run_experiment(spec, workers=args.workers)
    out = Path(args.out)
    emit_csv(result.aggregates, out / "results.csv")
    emit_trials_csv(result.records_frame(), out / "trials.csv")
    emit_plot(result.aggregates, out / "rates.svg", title=spec.name)
    emit_json(result.summary(), out / "summary.json")
    logger.info(f"✅ Results written to {out}")
    return EXIT_OK


def _network_points(doc):
    """(label, NetworkConfig) for a plain network JSON or every sweep point of an experiment."""
    if "network" in doc:
        spec = ExperimentSpec.from_dict(doc)
        return [(f"{spec.sweep_param}={v}", spec.point_config(v)) for v in spec.sweep_values]
    return [(None, NetworkConfig.from_dict(doc))]


def cmd_analyze(args) -> int:
    calc = RateBoundCalculator(samples=args.samples, method=args.method, seed=args.seed)
    reports = []
    for label, config in _network_points(load_json_document(args.config)):
        report = calc.rate_bound(config).to_dict()
        if label:
            report = {"point": label, **report}
        if args.optimize:
            if not config.is_homogeneous:
                logger.warning(f"{label or 'network'}: caching optimization needs a homogeneous config, skipped")
            else:
                best = optimize_caching_distribution(config.Q[0], float(config.M[0]), int(config.L[0]), config.n)
                report["optimized"] = {"m_tilde": best.m_tilde, **best.bound.to_dict()}
        reports.append(report)
    payload = reports[0] if len(reports) == 1 else reports
    text = json.dumps(payload, indent=2, default=float)
    if args.out:
        emit_json(payload, args.out)
    print(text)
    return EXIT_OK


def cmd_oracle(args) -> int:
    doc = load_json_document(args.config)
    net_doc = doc.get("network", doc)
    config = NetworkConfig.from_dict(net_doc)
    if "realization" in doc:
        cache, requests = realization_from_dict(doc["realization"], config)
    else:
        rng = make_rng(args.seed if args.seed is not None else (config.seed or 0), 0, 0)
        requests = sample_requests(config, rng)
        cache = rap_place(config, rng)
    g = build_conflict_graph(cache, DemandRealization.from_requests(requests, cache))
    logger.info(f"Conflict graph: {g.size} vertices, {g.edge_count} edges")

    exact = brute_force_oracle(g, max_vertices=args.vertices)
    outcomes = [gclc1(g), gclc2(g), hglc1(g, params=HglcParams(), seed=args.seed), exact]
    report = {
        "vertices": g.size,
        "edges": g.edge_count,
        "B": config.B,
        "results": [{**o.summary(), "rate": o.rate(config.B)} for o in outcomes],
    }
    for o in outcomes:
        if o.local_number < exact.local_number:
            raise InvariantBreachError(f"{o.algorithm.value} beat the exact local number")
        verify_round_trip(g, o, seed=args.seed)
    if args.dimacs:
        g.write_dimacs(args.dimacs)
    if args.coloring_out:
        exact.dump(args.coloring_out, Path(args.coloring_out).with_suffix(".json"))
    print(json.dumps(report, indent=2))
    return EXIT_OK


def parse_args(argv=None):
    p = argparse.ArgumentParser(description="Coded multicasting for shared-link caching networks")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte Carlo experiment")
    sim.add_argument("--config", required=True, help="experiment JSON")
    sim.add_argument("--out", required=True, help="output folder")
    sim.add_argument("--trials", type=int, help="override trial count")
    sim.add_argument("--seed", type=int, help="override base seed")
    sim.add_argument("--a", type=float, help="HgLC W1 window fraction")
    sim.add_argument("--b", type=float, help="HgLC W2 window fraction")
    sim.add_argument("--verify-coding", choices=("on", "off", "auto"), default="auto",
                     help="encode/decode round trip on every coloring")
    sim.add_argument("--gclc-grouping", choices=("cardinality", "set"), help="GCLC1 grouping rule")
    sim.add_argument("--workers", type=int, help="worker processes (COLOR_THREADS otherwise)")
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser("analyze", help="asymptotic rate bounds")
    ana.add_argument("--config", required=True, help="network or experiment JSON")
    ana.add_argument("--samples", type=int, default=20000, help="Monte Carlo draws for sampled rho")
    ana.add_argument("--method", choices=("exact", "sampled"), default="exact", help="rho evaluation")
    ana.add_argument("--seed", type=int, default=None)
    ana.add_argument("--optimize", action="store_true", help="also report the best truncated-uniform P")
    ana.add_argument("--out", help="also write the JSON report here")
    ana.set_defaults(func=cmd_analyze)

    orc = sub.add_parser("oracle", help="exact local chromatic number of a tiny instance")
    orc.add_argument("--config", required=True, help="network JSON, optionally with a fixed realization")
    orc.add_argument("--vertices", type=int, default=ORACLE_MAX_VERTICES, help="size guard")
    orc.add_argument("--seed", type=int, default=None)
    orc.add_argument("--dimacs", help="write the conflict graph as a DIMACS edge list")
    orc.add_argument("--coloring-out", help="write the optimal coloring")
    orc.set_defaults(func=cmd_oracle)
    return p.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    add_file_sink()
    try:
        return args.func(args)
    except (InvariantBreachError, DecodeError, ColoringValidityError) as e:
        logger.error(f"Invariant breach: {e}")
        return EXIT_INVARIANT
    except CodedCachingError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
