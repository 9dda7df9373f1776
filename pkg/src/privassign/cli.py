"""Command line front end: ``privassign run`` and ``privassign sweep``.

Exit codes: 0 on success, 2 on a configuration error, 3 on a data error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .baselines import BaselineKind
from .harness import (ConfigError, DataError, ExperimentConfig, format_rows, load_config_file,
                      parse_value, run_sweep, sweep_grid)

EXIT_CONFIG = 2
EXIT_DATA = 3

# CLI flag -> config field
_FLAGS = {
    "algo": "algo",
    "tasks": "n_tasks",
    "ratio": "worker_task_ratio",
    "task_value": "task_value",
    "worker_range": "worker_range",
    "eps": "eps_range",
    "z": "budget_group_size",
    "batch": "batch_size",
    "dist": "distribution",
    "input_tasks": "input_tasks",
    "input_workers": "input_workers",
    "seed": "seed",
    "alpha": "alpha",
    "beta": "beta",
    "spread": "sigma_or_var",
    "spread_mode": "spread_mode",
    "group_size": "worker_group_size",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--tasks", help="number of tasks")
    p.add_argument("--ratio", help="workers per task")
    p.add_argument("--task-value")
    p.add_argument("--worker-range")
    p.add_argument("--eps", help="budget range LO,HI")
    p.add_argument("--z", help="budgets per pair")
    p.add_argument("--batch", help="tasks per batch")
    p.add_argument("--dist", choices=["uniform", "normal"])
    p.add_argument("--input-tasks")
    p.add_argument("--input-workers")
    p.add_argument("--seed")
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--spread", help="normal spread parameter")
    p.add_argument("--spread-mode", choices=["variance", "sigma"])
    p.add_argument("--group-size", help="workers per group (csv input)")
    p.add_argument("--no-timing", action="store_true",
                   help="leave elapsed_ms empty so output is byte-reproducible")
    p.add_argument("--jobs", type=int, default=1, help="parallel runs")
    p.add_argument("--out", help="output CSV (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="privassign", description="Private spatial task assignment simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    algos = [k.value for k in BaselineKind]
    run = sub.add_parser("run", help="run one configuration")
    run.add_argument("--algo", choices=algos)
    _add_common(run)
    sweep = sub.add_parser("sweep", help="vary one parameter")
    sweep.add_argument("--param", required=True, help="config field to vary")
    sweep.add_argument("--values", required=True,
                       help="comma separated values (eps ranges as LO:HI)")
    sweep.add_argument("--algo", choices=algos)
    _add_common(sweep)
    return parser


def config_from_args(args) -> ExperimentConfig:
    values = load_config_file(args.config) if args.config else {}
    for flag, key in _FLAGS.items():
        raw = getattr(args, flag, None)
        if raw is not None:
            values[key] = parse_value(key, str(raw))
    if args.input_tasks or args.input_workers:
        values["distribution"] = "csv"
    if args.no_timing:
        values["record_time"] = False
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _sweep_values(param: str, raw: str) -> list:
    items = [v for v in raw.split(",") if v.strip()]
    if not items:
        raise ConfigError("--values is empty")
    if param == "eps_range":
        items = [v.replace(":", ",") for v in items]
    return [parse_value(param, v) for v in items]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        base = config_from_args(args)
        if args.command == "run":
            grid = [base]
        else:
            param = _FLAGS.get(args.param.replace("-", "_"), args.param)
            grid = sweep_grid(base, param, _sweep_values(param, args.values))
        text = format_rows(run_sweep(grid, workers=args.jobs))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
