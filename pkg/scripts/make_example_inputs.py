"""Write sample state and measurement files for steerctl into a directory."""

import argparse
from pathlib import Path

import numpy as np

from steerkit.io import dump_json, state_to_json
from steerkit.measurements import assembly_to_json, mub_pair_assembly
from steerkit.steering import product_state

ZX = [[0, 0, 1], [1, 0, 0]]
ZXY = [[0, 0, 1], [1, 0, 0], [0, 1, 0]]
# phi+ correlates sigma_y with -sigma_y, so Alice measures the conjugate axes
ZXY_CONJ = [[0, 0, 1], [1, 0, 0], [0, -1, 0]]
FOUR_VECTOR = [[0, 0, 1], [-0.5, np.sqrt(3) / 2, 0], [1, 0, 0], [-0.5, -np.sqrt(3) / 2, 0]]


def write_inputs(out: Path) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "axes_zx.json": {"axes": ZX},
        "axes_zxy.json": {"axes": ZXY},
        "axes_zxy_conj.json": {"axes": ZXY_CONJ},
        "four_vector.json": {"axes": FOUR_VECTOR},
        "mub_d4.json": assembly_to_json(mub_pair_assembly(4)),
        "werner_0.8.json": {"kind": "isotropic", "d": 2, "eta": 0.8},
        "werner_0.6.json": {"kind": "isotropic", "d": 2, "eta": 0.6},
        "werner_0.55.json": {"kind": "isotropic", "d": 2, "eta": 0.55},
        "werner_0.45.json": {"kind": "isotropic", "d": 2, "eta": 0.45},
        "pure_half_pi.json": {"kind": "pure", "gamma": float(np.pi / 2)},
        "product.json": state_to_json(product_state(np.diag([1.0, 0.0]), np.eye(2) / 2)),
    }
    paths = []
    for name, obj in files.items():
        dump_json(obj, out / name)
        paths.append(out / name)
    return paths


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", nargs="?", default="inputs")
    args = ap.parse_args()
    for p in write_inputs(Path(args.out)):
        print(p)


if __name__ == "__main__":
    main()
