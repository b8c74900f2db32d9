"""Command line entry point.

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import lr_oracle
from .errors import BellHdaError, ConfigError, InsufficientDwellError, NumericFailureError
from .runner import Scenario, emit_trace, load_config, metrics_csv, run, sweep_gamma, trace_csv

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="")


def _parse_gammas(text: str) -> list[float]:
    try:
        gammas = [float(g) for g in text.split(",") if g.strip()]
    except ValueError:
        raise ConfigError(f"bad gamma list: {text!r}") from None
    if not gammas:
        raise ConfigError("gamma list is empty")
    return gammas


def cmd_run(args) -> None:
    config = load_config(args.config)
    if args.static:
        config = replace(config, scenario=Scenario.STATIC_BLOCKS)
    result = run(config)
    _write(metrics_csv([result.metrics]), args.out)
    if getattr(args, "trace", None):
        _write(trace_csv(emit_trace(result)), args.trace)


def cmd_sweep(args) -> None:
    config = load_config(args.config)
    if args.replicates < 1 or args.jobs < 1:
        raise ConfigError("--replicates and --jobs must be >= 1")
    rows = sweep_gamma(config, _parse_gammas(args.gammas), args.replicates, args.jobs)
    _write(metrics_csv(rows), args.out)


def cmd_oracle(args) -> None:
    print("strategy\tA0B0\tA0B1\tA1B0\tA1B1\tS")
    best = 0.0
    for label, prods, s in lr_oracle.enumeration_table():
        print(label + "\t" + "\t".join(f"{p:+d}" for p in prods) + f"\t{s:g}")
        best = max(best, s)
    print(f"max S over deterministic strategies: {best:g}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bellhda", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="single run, one metrics row")
    p.add_argument("--config", required=True)
    p.add_argument("--trace", help="write alpha(t), a(t), b(t) to this CSV")
    p.add_argument("--out", help="metrics CSV (default stdout)")
    p.set_defaults(func=cmd_run, static=False)

    p = sub.add_parser("sweep", help="runs over a list of gamma values")
    p.add_argument("--config", required=True)
    p.add_argument("--gammas", required=True, help='comma separated, e.g. "0.02,0.1,1"')
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("static", help="single run with the four-block schedule")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run, static=True)

    p = sub.add_parser("oracle", help="print the 16 deterministic strategies and their S")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except NumericFailureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, InsufficientDwellError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BellHdaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
