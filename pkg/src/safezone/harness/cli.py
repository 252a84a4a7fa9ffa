"""Command line entry point: ``safezone <command> ...``.

Exit codes: 0 success, 2 invalid input, 3 file system error, 4 the evaluated
trajectory never reaches the goal.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..exceptions import SafezoneError, ValidationError
from . import pipeline
from .io import load_trajectory, save_trajectory
from .report import _csv_text, _write, dumps, emit_report
from .scenario import BUILTIN_PREFIX, load_scenario
from .sweeps import beta_curves, psi_curves

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_UNREACHED = 0, 2, 3, 4
DEFAULT_SCENARIO = BUILTIN_PREFIX + "crossing"

log = logging.getLogger("safezone")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _out(path):
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_evaluate(args):
    scenario = load_scenario(args.scenario)
    traj = load_trajectory(args.trajectory, args.trajectory_format)
    report = pipeline.evaluate(scenario, traj, Path(args.trajectory).stem)
    for p in emit_report(report, args.format, args.out):
        print(p)
    if not report.criteria.goal_reached:
        print(f"goal not reached by {args.trajectory}", file=sys.stderr)
        return EXIT_UNREACHED
    return EXIT_OK


def cmd_optimize(args):
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    result, report, baseline = pipeline.run_optimize(scenario, with_opponent=not args.no_opponent)
    out = _out(args.out)
    doc = {"format": "safezone.optimize/1", "scenario": scenario.name,
           "seed": scenario.pso.seed, "optimized": report.to_dict()}
    if args.baseline:
        doc["baseline"] = baseline.to_dict()
    paths = [_write(out / "optimize.json", dumps(doc))]
    if args.format == "csv":
        paths += emit_report(report, "csv", out / "optimized")
        if args.baseline:
            paths += emit_report(baseline, "csv", out / "baseline")
    paths.append(save_trajectory(result.rollout.trajectory, out / "trajectory.csv"))
    for p in paths:
        print(p)
    c = report.criteria
    log.info("Q=%.6g  max Int=%.4g  stop=%.2fs  C_longi=%.4g  C_lat=%.4g",
             c.q, c.int_max, report.stop_duration_s, c.c_longi, c.c_lat)
    return EXIT_OK


def cmd_compare(args):
    scenario = load_scenario(args.scenario)
    labelled = []
    for i, path in enumerate(args.trajectory):
        labelled.append((f"{i}:{Path(path).name}", load_trajectory(path)))
    ranked = pipeline.compare(scenario, labelled)
    doc = {"format": "safezone.compare/1", "scenario": scenario.name,
           "ranking": [{"rank": r + 1, "label": rep.label, "q": rep.q,
                        "goal_reached": rep.criteria.goal_reached,
                        "int_max": rep.criteria.int_max} for r, rep in enumerate(ranked)],
           "reports": [rep.to_dict() for rep in ranked]}
    print(_write(_out(args.out) / "compare.json", dumps(doc)))
    return EXIT_OK


def cmd_sweep_beta(args):
    header, rows = beta_curves(args.m, args.p, args.alpha, args.x_min, args.x_max, args.points)
    print(_write(_out(args.out) / "beta_curves.csv", _csv_text(header, zip(*rows))))
    return EXIT_OK


def cmd_sweep_psi(args):
    header, rows = psi_curves(args.m, args.p, args.x_min, args.x_max, args.points)
    print(_write(_out(args.out) / "psi_curves.csv", _csv_text(header, zip(*rows))))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="safezone", description="Safety-zone criteria and PSO maneuver optimization.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_arg(p):
        p.add_argument("--scenario", default=DEFAULT_SCENARIO,
                       help=f"scenario YAML file or builtin:<name> (default {DEFAULT_SCENARIO})")

    p = sub.add_parser("evaluate", help="score a recorded ego trajectory")
    scenario_arg(p)
    p.add_argument("--trajectory", required=True)
    p.add_argument("--trajectory-format", choices=("csv", "json"))
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("optimize", help="optimize the ego acceleration profile")
    scenario_arg(p)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--baseline", action="store_true",
                   help="include the constant-speed baseline report")
    p.add_argument("--no-opponent", action="store_true", help="optimize on an empty road")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="csv additionally writes the CSV bundle(s)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("compare", help="rank several ego trajectories by Q")
    scenario_arg(p)
    p.add_argument("--trajectory", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep-beta", help="shaping-function curve data")
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--p", type=float, default=5.0)
    p.add_argument("--alpha", type=_floats, default=[0.2, 0.3, 0.5, 0.9, 8.0])
    p.add_argument("--x-min", type=float, default=-10.0)
    p.add_argument("--x-max", type=float, default=1.0)
    p.add_argument("--points", type=int, default=221)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep_beta)

    p = sub.add_parser("sweep-psi", help="penalty-function curve data")
    p.add_argument("--m", type=_floats, default=[1.0])
    p.add_argument("--p", type=_floats, default=[2.0, 5.0, 10.0])
    p.add_argument("--x-min", type=float, default=-0.5)
    p.add_argument("--x-max", type=float, default=1.0)
    p.add_argument("--points", type=int, default=151)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep_psi)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if getattr(args, "points", 2) < 2:
            raise ValidationError("--points must be at least 2")
        return args.func(args)
    except (ValidationError, SafezoneError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
