#!/usr/bin/env python3
"""Render every figure kind from a finished study directory."""
import argparse
import sys

from srmks.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--results", default="results", help="directory with records.csv")
    parser.add_argument("--out", default="figures")
    args = parser.parse_args()
    records = f"{args.results}/records.csv"
    for kind in ("boxplot", "complexity", "predictions"):
        code = cli_main(["plot", "--records", records, "--kind", kind, "--out", args.out])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
