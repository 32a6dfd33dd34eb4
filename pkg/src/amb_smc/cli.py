"""Command-line front end.

    amb-smc run --config scenario.toml [--set key=value ...] [--plot]
                [--out DIR] [--format csv|jsonl] [--seed N]
    amb-smc sweep --config scenario.toml --axis k=10,25,50 [--axis ...]
    amb-smc validate-config --config scenario.toml

Output goes to ``--out``, else ``$AMB_SMC_OUTPUT_ROOT``, else ``./runs``.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .config import ConfigError, apply_overrides, config_from_mapping, dump_config, load_mapping
from .output import write_csv, write_jsonl, write_metrics
from .sim import run

OUTPUT_ENV = "AMB_SMC_OUTPUT_ROOT"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONTACT = 3
EXIT_SINGULAR = 4
EXIT_BLOWUP = 5

_EXIT_FOR_REASON = {
    "rotor_contact": EXIT_CONTACT,
    "singular_gradient": EXIT_SINGULAR,
    "numerical_blowup": EXIT_BLOWUP,
}


def _output_root(arg):
    if arg:
        return Path(arg)
    return Path(os.environ.get(OUTPUT_ENV, "runs"))


def _load(args):
    mapping = load_mapping(Path(args.config).read_text())
    overrides = list(args.set or [])
    if getattr(args, "seed", None) is not None:
        overrides.append(f"scenario.seed={args.seed}")
    mapping = apply_overrides(mapping, overrides)
    return mapping, config_from_mapping(mapping)


def cmd_validate(args) -> int:
    _, cfg = _load(args)
    sys.stdout.write(dump_config(cfg))
    return EXIT_OK


def cmd_run(args) -> int:
    _, cfg = _load(args)
    name = args.name or Path(args.config).stem
    run_dir = _output_root(args.out) / name
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.toml").write_text(dump_config(cfg))

    records, metrics = run(cfg)
    writer = write_csv if args.format == "csv" else write_jsonl
    writer(records, run_dir / f"log.{args.format}")
    write_metrics(metrics, run_dir / "metrics.json")
    if args.plot and records:
        from .plots import emit_plots
        emit_plots(records, metrics, run_dir, run_name=name, params=cfg.plant)
    print(json.dumps(metrics.to_dict(), indent=2))
    return _EXIT_FOR_REASON.get(metrics.termination_reason, EXIT_OK)


def cmd_sweep(args) -> int:
    from .sweep import parse_axis, sweep, write_sweep_csv

    mapping, _ = _load(args)
    axes = [parse_axis(spec) for spec in args.axis or []]
    out = _output_root(args.out) / (args.name or f"{Path(args.config).stem}_sweep")
    out.mkdir(parents=True, exist_ok=True)
    rows = sweep(mapping, axes, cap=args.cap, workers=args.workers, output_dir=out,
                 log_format=args.format)
    path = write_sweep_csv(rows, [key for key, _ in axes], out / "sweep.csv")
    print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="amb-smc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="scenario TOML file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config value (repeatable)")

    p_run = sub.add_parser("run", help="simulate one scenario")
    common(p_run)
    p_run.add_argument("--plot", action="store_true")
    p_run.add_argument("--out")
    p_run.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--name", help="run directory name (default: config file stem)")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a cross product of parameter values")
    common(p_sweep)
    p_sweep.add_argument("--axis", action="append", metavar="KEY=V1,V2,...")
    p_sweep.add_argument("--out")
    p_sweep.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p_sweep.add_argument("--seed", type=int)
    p_sweep.add_argument("--workers", type=int)
    p_sweep.add_argument("--cap", type=int, default=256)
    p_sweep.add_argument("--name")
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate-config", help="resolve and check a config without running")
    common(p_val)
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
