"""Command-line entry point for the benchmark harness.

Exit codes: 0 for a completed sweep, 2 when a time or memory budget
truncated the sweep (partial records are still written), 1 on error.
"""

from __future__ import annotations

import argparse
import sys

from .bench import CLI_SCHEMES, BenchConfig, BenchError, emit, run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="witnessbench",
        description="Benchmark stateless-client witness schemes over a tree-size sweep.",
    )
    parser.add_argument("--scheme", required=True, choices=CLI_SCHEMES)
    parser.add_argument("--min-log-leaves", type=int, default=5, metavar="J")
    parser.add_argument("--max-log-leaves", type=int, default=16, metavar="J")
    parser.add_argument("--keys", type=int, default=5000, help="key budget per tree (default 5000)")
    parser.add_argument("--reps", type=int, default=10, help="repetitions per size (default 10)")
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument(
        "--time-budget", type=float, default=300.0, metavar="SECONDS",
        help="abort the sweep once a single repetition exceeds this (default 300)",
    )
    parser.add_argument(
        "--mem-budget", type=int, default=4096, metavar="MIB",
        help="abort the sweep once peak RSS exceeds this (default 4096)",
    )
    parser.add_argument(
        "--parallel", type=int, default=1, metavar="N",
        help="run repetitions on N threads (default 1: single-threaded numbers are primary)",
    )
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", default=None, help="output path (default bench-<scheme>.<format>)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = args.out or f"bench-{args.scheme}.{args.format}"
    try:
        config = BenchConfig(
            scheme=args.scheme,
            min_log_leaves=args.min_log_leaves,
            max_log_leaves=args.max_log_leaves,
            keys=args.keys,
            reps=args.reps,
            seed=args.seed,
            time_budget_s=args.time_budget,
            mem_budget_mb=args.mem_budget,
            parallel=args.parallel,
        )
        records = run(config)
        for record in records:
            mean_prove = record._mean(record.prove_ns)
            print(
                f"{record.scheme} leaves={record.leaf_count} proven={record.keys_proven} "
                f"reps={record.reps_completed} status={record.status} "
                f"prove_mean={mean_prove / 1e6:.2f}ms",
                file=sys.stderr,
            )
        path = emit(records, args.format, out)
        print(f"wrote {len(records)} records to {path}", file=sys.stderr)
    except (BenchError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2 if any(r.status != "ok" for r in records) else 0


if __name__ == "__main__":
    sys.exit(main())
