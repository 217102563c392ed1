"""Command-line interface: one subcommand per scenario.

Exit codes: 0 on full success, 2 when some sweep points failed, 1 on a
fatal error.  The --threads option affects speed only, never results.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .calibration import default_config
from .config import ConfigValidationError
from .configio import ConfigFileError, load_config
from .harness import SCENARIOS, RunReport, ScenarioSpec, run_scenario

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dlczsim",
        description="Simulate and analyze a far off-resonance DLCZ memory.")
    sub = parser.add_subparsers(dest="scenario", required=True)
    for scenario in SCENARIOS:
        p = sub.add_parser(scenario, help=f"run the {scenario} scenario")
        _add_common(p)
    rerun = sub.add_parser("rerun", help="re-run a scenario from a run report")
    rerun.add_argument("report", help="path to a *_report.json file")
    rerun.add_argument("--out", default=".", help="output directory")
    rerun.add_argument("--threads", type=int, default=1)
    return parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None,
                   help="config file (defaults to the calibrated operating point)")
    p.add_argument("--seed", type=int, default=None, help="RNG seed override")
    p.add_argument("--trials", type=int, default=None,
                   help="trials per sweep point override")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads (speed only, results are identical)")
    p.add_argument("--sweep", default=None, metavar="KEY=V1,V2,...",
                   help="sweep a config key (config-file units), e.g. "
                        "pulses.energy_pj=20,60,129")


def _parse_sweep(text: str) -> tuple[str, tuple[float, ...]]:
    if "=" not in text:
        raise ConfigFileError("--sweep expects KEY=V1,V2,...")
    key, values = text.split("=", 1)
    parsed = tuple(float(v) for v in values.split(",") if v.strip())
    if not parsed:
        raise ConfigFileError("--sweep needs at least one value")
    return key.strip(), parsed


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.scenario == "rerun":
            report = RunReport.load(args.report)
            run = run_from_report_args(args, report)
        else:
            cfg = load_config(args.config) if args.config else default_config()
            if args.seed is not None:
                cfg = replace(cfg, rng_seed=args.seed)
            if args.trials is not None:
                cfg = replace(cfg, trials=args.trials)
            sweep = _parse_sweep(args.sweep) if args.sweep else None
            spec = ScenarioSpec(args.scenario, cfg, sweep=sweep,
                                output_dir=args.out, threads=args.threads)
            run = run_scenario(spec)
    except (ConfigFileError, ConfigValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if run.failed_points:
        print(f"warning: {len(run.failed_points)} sweep point(s) failed: "
              f"{run.failed_points}", file=sys.stderr)
        return 2
    print(f"{run.scenario_id}: wrote {len(run.artifacts)} artifact(s) "
          f"in {run.wall_time_s:.2f}s")
    return 0


def run_from_report_args(args, report: RunReport):
    from .harness import run_from_report

    return run_from_report(args.report, args.out, threads=args.threads)


if __name__ == "__main__":
    raise SystemExit(main())
