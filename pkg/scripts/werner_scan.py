"""Scan the Werner family and write every criterion against the noise level.

Columns: eta, verdicts for the two- and three-axis sets, R2, R3 and (unless
``--skip-rinf``) R_inf. The output is plain CSV for plotting elsewhere.
"""

import argparse
import csv
import sys

import numpy as np

from steerkit.adapted import r2_criterion, r3_criterion, r_infinity_criterion
from steerkit.measurements import qubit_assembly
from steerkit.steering import isotropic_state, verdict
from steerkit.thresholds import general_nst

SETS = {"zx": [[0, 0, 1], [1, 0, 0]], "zxy": [[0, 0, 1], [1, 0, 0], [0, 1, 0]]}


def scan(etas, resolution=64, with_rinf=True):
    bobs = {k: qubit_assembly(v) for k, v in SETS.items()}
    thresholds = {k: general_nst(b) for k, b in bobs.items()}
    for eta in etas:
        w = isotropic_state(2, float(eta))
        row = {"eta": float(eta)}
        for k, bob in bobs.items():
            v = verdict(w, bob.conjugate(), bob, thresholds[k])
            row[f"ratio_{k}"] = v.ratio
            row[f"steerable_{k}"] = int(v.steerable)
        row["R2"] = r2_criterion(w).value
        row["R3"] = r3_criterion(w).value
        if with_rinf:
            row["Rinf"] = r_infinity_criterion(w, resolution).value if eta > 0 else 0.0
        yield row


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=41)
    ap.add_argument("--resolution", type=int, default=64)
    ap.add_argument("--skip-rinf", action="store_true")
    ap.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    args = ap.parse_args()

    rows = list(scan(np.linspace(0.0, 1.0, args.points), args.resolution, not args.skip_rinf))
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: f"{v:.6f}" if isinstance(v, float) else v for k, v in row.items()})
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
