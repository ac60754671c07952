"""Command-line entry point: ``mpbo run | dump-landscape | verify``.

Exit codes: 0 success, 1 verification mismatch, 2 configuration error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .experiment import dump_landscape, load_config, run_experiment, verify_results
from .gp import ConfigurationError

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mpbo", description="Multi-policy Bayesian optimization experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run every (algorithm, seed) cell of a config")
    run.add_argument("config", help="flat JSON experiment config")

    dump = sub.add_parser("dump-landscape", help="write a 2-D reward slice of one policy as CSV")
    dump.add_argument("config")
    dump.add_argument("--policy", type=int, required=True, help="0-based policy index")
    dump.add_argument("--resolution", type=int, default=51)

    ver = sub.add_parser("verify", help="recompute summaries from stored traces")
    ver.add_argument("results_dir")
    return parser


def _run(args) -> int:
    config = load_config(args.config)
    run_experiment(config)
    return EXIT_OK


def _dump(args) -> int:
    config = load_config(args.config)
    print(dump_landscape(config, args.policy, args.resolution))
    return EXIT_OK


def _verify(args) -> int:
    problems = verify_results(args.results_dir)
    for p in problems:
        print(p, file=sys.stderr)
    if problems:
        return EXIT_MISMATCH
    print(f"verified {args.results_dir}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors count as configuration errors
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    handler = {"run": _run, "dump-landscape": _dump, "verify": _verify}[args.command]
    try:
        return handler(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        # ValueError here means an unreadable results file (bad JSON or layout)
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
