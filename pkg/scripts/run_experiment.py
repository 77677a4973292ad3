#!/usr/bin/env python3
"""Run the reference Monte-Carlo study and write its outputs.

Equivalent to `srmks experiment` with the default configuration; flags
override the repetition count, base seed and output directory.
"""
import argparse
import sys

from srmks.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=100)
    parser.add_argument("--seed", type=int, default=1234)
    parser.add_argument("--out", default="results")
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args()
    argv = ["experiment", "--reps", str(args.reps), "--seed", str(args.seed), "--out", args.out]
    if args.workers is not None:
        argv += ["--workers", str(args.workers)]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
