"""Command-line entry point for running simulation batches."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from . import harness
from .scenarios import (Scenario, ScenarioError, builtin_scenario,
                        load_config_file, load_scenario_file)

EXIT_OK = 0
EXIT_COLLISION = 2
EXIT_FAILED = 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="simulate",
        description="Deterministic 2D drone obstacle-avoidance simulator")
    p.add_argument("--scenario", default="world1",
                   help="world1 | world2 | empty | path to a scenario file")
    p.add_argument("--speed", type=float, default=4.0,
                   help="cruise speed in m/s (the published runs use 4 or 6)")
    p.add_argument("--seed", type=int, default=0, help="base RNG seed")
    p.add_argument("--runs", type=int, default=1,
                   help="number of runs; run i uses seed + i")
    p.add_argument("--dt", type=float, default=None,
                   help="simulation step in seconds (default 0.02)")
    p.add_argument("--out", default=None,
                   help="output directory for per-run artifacts")
    p.add_argument("--config", default=None,
                   help="INI config overriding scenario parameters")
    p.add_argument("--heading-rate", type=float, default=None,
                   help="optional yaw rate limit in rad/s")
    p.add_argument("--disturb", default=None, metavar="T,VX,VY",
                   help="velocity impulse (wind gust) at sim time T")
    return p


def _load_scenario(args) -> Scenario:
    if args.scenario in ("world1", "world2", "empty"):
        scenario = builtin_scenario(args.scenario, v_cruise=args.speed)
    elif os.path.exists(args.scenario):
        scenario = load_scenario_file(args.scenario)
    else:
        raise ScenarioError(f"unknown scenario {args.scenario!r}")
    if args.config:
        scenario = load_config_file(scenario, args.config)
    # command-line flags override file values
    scenario = replace(scenario,
                       dynamics=replace(scenario.dynamics,
                                        v_cruise=args.speed,
                                        heading_rate=args.heading_rate))
    if args.dt is not None:
        scenario = replace(scenario, dt=args.dt)
    return scenario


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = _load_scenario(args)
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    disturb = None
    if args.disturb:
        parts = [float(v) for v in args.disturb.split(",")]
        if len(parts) != 3:
            print("error: --disturb expects T,VX,VY", file=sys.stderr)
            return EXIT_FAILED
        disturb = tuple(parts)
    any_collision = False
    any_failed = False
    all_metrics = []
    for i in range(args.runs):
        seed = args.seed + i
        metrics, trace = harness.run(scenario, seed, disturb=disturb)
        all_metrics.append(metrics)
        tag = "OK" if metrics.completed else metrics.reason.upper() or "DNF"
        print(f"run seed={seed}: {tag}  d_trv={metrics.d_trv:.1f} m  "
              f"v_max={metrics.v_max:.2f} m/s  "
              f"expansions={metrics.expansions}  "
              f"wall={metrics.runtime:.2f} s")
        any_collision |= metrics.collided
        any_failed |= not metrics.completed and not metrics.collided
        if args.out:
            out_dir = os.path.join(args.out, f"run_{seed}")
            try:
                harness.emit_outputs(scenario, metrics, trace, out_dir)
            except IOError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_FAILED
    if args.runs > 1:
        summary = harness.summarize(all_metrics)
        print(f"batch: CMPL {summary.cmpl}  "
              f"d_trv {summary.metric_mean['d_trv']:.1f} "
              f"± {summary.metric_std['d_trv']:.1f} m  "
              f"v_max {summary.metric_mean['v_max']:.2f} "
              f"± {summary.metric_std['v_max']:.2f} m/s")
    if any_collision:
        return EXIT_COLLISION
    if any_failed:
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
