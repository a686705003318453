"""Planar thresholds for growing N and their approach to the circle value 2/pi."""

import argparse

import numpy as np

from steerkit.thresholds import DirectionDensity, continuous_nst, planar_nst, planar_nst_closed_form


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=20)
    args = ap.parse_args()

    circle = continuous_nst(DirectionDensity.uniform_circle())
    print(f"{'N':>4} {'enumerated':>12} {'closed form':>12} {'gap to 2/pi':>12}")
    for n in range(2, args.max_n + 1):
        g = planar_nst(n) if n <= 24 else planar_nst_closed_form(n)
        print(f"{n:>4} {g:12.6f} {planar_nst_closed_form(n):12.6f} {g - 2 / np.pi:12.2e}")
    print(f"circle quadrature {circle:.6f}  (2/pi = {2 / np.pi:.6f})")


if __name__ == "__main__":
    main()
