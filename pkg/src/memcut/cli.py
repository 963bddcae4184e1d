"""Command-line entry point: ``memcut solve | bench | plot``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import (METHODS, BenchConfig, emit_tradeoff_plot, read_csv, run_bench,
                    run_method, write_bench)
from .oracles import INSTANCE_KINDS, instance_to_json, make_instance
from .recursive import ENGINES


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="memcut", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    solve = sub.add_parser("solve", help="run one solve and write a JSON report")
    solve.add_argument("--method", required=True, choices=METHODS)
    solve.add_argument("--engine", choices=ENGINES + ("none",))
    solve.add_argument("--d", type=int, required=True)
    solve.add_argument("--p", type=int, default=1)
    solve.add_argument("--eps", type=float, required=True)
    solve.add_argument("--instance", choices=INSTANCE_KINDS, default="ball")
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--c-scale", type=float, default=1.0)
    solve.add_argument("--max-calls", type=int)
    solve.add_argument("--max-seconds", type=float)
    solve.add_argument("--trace", type=Path, help="write one JSON line per oracle call")
    solve.add_argument("--out", type=Path, required=True)

    bench = sub.add_parser("bench", help="sweep a grid from a JSON config")
    bench.add_argument("--config", type=Path, required=True)
    bench.add_argument("--out", type=Path, required=True)
    bench.add_argument("--jobs", type=int, help="override the config's job count")

    plot = sub.add_parser("plot", help="plot calls against peak bits from a bench directory")
    plot.add_argument("--in", dest="indir", type=Path, required=True)
    plot.add_argument("--out", type=Path, required=True)
    return parser


def _solve(args) -> int:
    instance = make_instance(args.instance, args.d, args.eps, args.seed)
    trace = open(args.trace, "w") if args.trace else None
    try:
        report = run_method(args.method, instance, args.d, args.eps, args.p, args.engine,
                            args.c_scale, trace, args.max_calls, args.max_seconds)
    finally:
        if trace:
            trace.close()
    payload = report.to_dict()
    payload["instance"] = json.loads(instance_to_json(instance))
    args.out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 0 if report.success else 2


def _bench(args) -> int:
    config = BenchConfig.from_json(args.config.read_text())
    if args.jobs is not None:
        config.jobs = args.jobs
    reports = run_bench(config)
    write_bench(reports, args.out)
    return 0 if all(r.success for r in reports) else 2


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "solve":
            return _solve(args)
        if args.command == "bench":
            return _bench(args)
        emit_tradeoff_plot(read_csv(args.indir / "results.csv"), args.out)
        return 0
    except (UsageError, ValueError, TypeError, FileNotFoundError) as exc:
        print(f"memcut: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
