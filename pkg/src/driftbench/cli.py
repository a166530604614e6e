"""Command-line surface: one subcommand per experiment family."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import experiments
from .config import ConfigError, RunConfig, load_config

_RUNNERS = {
    "benchmark": experiments.run_benchmark,
    "cv-compare": experiments.run_cv_compare,
    "online": experiments.run_online,
    "ablation": experiments.run_ablation,
    "linearity": experiments.run_linearity,
    "automl": experiments.run_automl,
    "grid": experiments.run_grid,
}

_VERB_TO_EXPERIMENT = {
    "benchmark": "benchmark",
    "cv-compare": "cv_compare",
    "online": "online",
    "ablation": "ablation",
    "linearity": "linearity",
    "automl": "automl",
    "grid": "grid",
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="run config file (YAML)")
    parser.add_argument("--seed", type=int, help="single seed override")
    parser.add_argument("--seeds", help="comma-separated seed list override")
    parser.add_argument("--out", help="output directory override")
    parser.add_argument("--budget-secs", type=float,
                        help="wall-clock budget override (seconds)")
    parser.add_argument("--workers", type=int, help="parallel seed workers")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip figure rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driftbench",
        description="Chronological-drift benchmarking and AutoML experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for verb in _RUNNERS:
        p = sub.add_parser(verb, help=f"run the {verb} experiment")
        _add_common(p)
    check = sub.add_parser("fetch-check",
                           help="validate dataset files against the published count tables")
    check.add_argument("files", nargs="+", help="batch files, chronological order")
    return parser


def _apply_overrides(cfg: RunConfig, args: argparse.Namespace, verb: str) -> RunConfig:
    cfg.experiment = _VERB_TO_EXPERIMENT[verb]
    if args.seed is not None and args.seeds:
        raise ConfigError("--seed and --seeds are mutually exclusive")
    if args.seed is not None:
        cfg.seeds = [args.seed]
    elif args.seeds:
        cfg.seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    if args.out:
        cfg.output_dir = Path(args.out)
    if args.budget_secs is not None:
        cfg.budget = replace(cfg.budget, wall_clock_secs=args.budget_secs,
                             per_trial_secs=min(cfg.budget.per_trial_secs, args.budget_secs))
    if args.workers is not None:
        cfg.workers = args.workers
    if args.no_figures:
        cfg.figures = False
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "fetch-check":
        ok, lines = experiments.fetch_check(args.files)
        for line in lines:
            print(line)
        return 0 if ok else 1
    try:
        cfg = load_config(args.config)
        cfg = _apply_overrides(cfg, args, args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    written = _RUNNERS[args.command](cfg)
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
