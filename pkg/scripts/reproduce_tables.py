"""Regenerate every reference table into a directory and print the summary.

Equivalent to ``steerctl reproduce --out DIR``; kept as a script so the
tables can be rebuilt without the console entry point installed.
"""

import argparse
import sys

from steerkit.cli import main


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/tables")
    ap.add_argument("--resolution", type=int, default=64, help="polar nodes of the sphere rule")
    return ap.parse_args()


if __name__ == "__main__":
    args = parse_args()
    sys.exit(main(["reproduce", "--out", args.out, "--resolution", str(args.resolution)]))
