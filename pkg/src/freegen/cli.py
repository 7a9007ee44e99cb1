"""Command-line entry point.

`freegen bench` runs one benchmark/algorithm experiment and emits a report;
`freegen demo` walks through a small generator, its language, and a chain of
derivatives. The FREEGEN_SEED environment variable, when set, overrides
--seed. Exit code is 0 on success and 1 on any error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .benchmarks import BENCHMARKS, fgen_bool_tree
from .core import lang, render
from .derivative import derivative, nullable_set
from .interp import parse
from .metrics import ExperimentSpec, emit_report, report_json, run_experiment

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freegen",
        description="Benchmark gradient-guided generation against rejection sampling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run one benchmark experiment")
    bench.add_argument("--benchmark", required=True, choices=sorted(BENCHMARKS))
    bench.add_argument("--algorithm", required=True, choices=["rejection", "cgs"])
    bench.add_argument(
        "--budget-secs",
        type=float,
        default=None,
        help="wall-clock budget per trial (default 10 unless --budget-episodes given)",
    )
    bench.add_argument(
        "--budget-episodes",
        type=int,
        default=None,
        help="episode budget per trial (deterministic mode; draws for rejection)",
    )
    bench.add_argument("--sample-rate", type=int, default=None)
    bench.add_argument("--depth", type=int, default=None)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--trials", type=int, default=1)
    bench.add_argument("--format", choices=["json", "csv"], default="json")
    bench.add_argument("--out", default=None, help="output path (stem for csv)")

    sub.add_parser("demo", help="print a small generator, its language, and derivatives")
    return parser


def _run_bench(args) -> int:
    seed = args.seed
    env_seed = os.environ.get("FREEGEN_SEED")
    if env_seed is not None:
        seed = int(env_seed)
    budget_seconds = args.budget_secs
    if budget_seconds is None and args.budget_episodes is None:
        budget_seconds = 10.0
    spec = ExperimentSpec(
        benchmark=args.benchmark,
        algorithm=args.algorithm,
        budget_seconds=budget_seconds,
        budget_episodes=args.budget_episodes,
        sample_rate=args.sample_rate,
        depth=args.depth,
        seed=seed,
        trials=args.trials,
    )
    report = run_experiment(spec)
    if args.out is None:
        if args.format == "csv":
            raise ValueError("csv output needs --out as a file stem")
        sys.stdout.write(report_json(report))
    else:
        emit_report(report, args.format, args.out)
    return 0


def _run_demo() -> int:
    g = fgen_bool_tree(2)
    print("A free generator for boolean trees of depth 2:")
    print(f"  {render(g)}")
    print()
    print("Its language, the choice sequences it can make or parse:")
    for s in sorted(lang(g), key=lambda s: (len(s), s)):
        print(f"  {s!r}")
    print()
    s = "ntll"
    print(f"Parsing {s!r} gives: {parse(g, s)!r}")
    print()
    print("Fixing choices one at a time with derivatives:")
    current = g
    for c in s:
        current = derivative(c, current)
        print(f"  after {c!r}: {render(current)}")
    print()
    print(f"No choices left; the value is {nullable_set(current)!r}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "bench":
            return _run_bench(args)
        return _run_demo()
    except (KeyboardInterrupt, SystemExit):
        raise
    except Exception as exc:
        print(f"freegen: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
