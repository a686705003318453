"""Regenerate the published threshold values as CSV tables."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .adapted import r2_criterion, r3_criterion, r_infinity_criterion
from .linalg import density_to_bloch
from .measurements import four_vector_candidate, mub_pair_assembly, qubit_assembly, tetrahedron_family
from .steering import isotropic_state, planar_lhs_witness, verdict, visibility_reference
from .thresholds import DirectionDensity, continuous_nst, general_nst, geometric_from_fidelity, planar_nst, qubit_nst

PLANAR_PUBLISHED = [0.7071, 0.6667, 0.6533, 0.6472, 0.6440, 0.6420, 0.6407, 0.6399, 0.6392]
HEADER = ("label", "computed", "paper_value", "abs_error")


@dataclass
class Table:
    name: str
    tolerance: float
    rows: list[tuple[str, float, float]] = field(default_factory=list)

    def add(self, label: str, computed: float, reference: float):
        self.rows.append((label, float(computed), float(reference)))

    @property
    def max_error(self) -> float:
        return max(abs(c - p) for _, c, p in self.rows)

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance

    def write(self, out_dir: Path) -> Path:
        path = Path(out_dir) / f"{self.name}.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(HEADER)
            for label, c, p in self.rows:
                writer.writerow((label, f"{c:.12f}", f"{p:.12f}", f"{abs(c - p):.3e}"))
        return path


def planar_table() -> Table:
    t = Table("planar", 1e-4)
    for n, ref in zip(range(2, 11), PLANAR_PUBLISHED):
        t.add(f"N={n}", planar_nst(n), ref)
    return t


def criteria_table() -> Table:
    t = Table("criteria", 1e-12)
    two = qubit_nst(qubit_assembly([[0, 0, 1], [1, 0, 0]])).g_nst
    three = qubit_nst(qubit_assembly([[0, 0, 1], [1, 0, 0], [0, 1, 0]])).g_nst
    t.add("g_nst{z,x}", two, np.sqrt(2) / 2)
    t.add("g_nst{z,x,y}", three, np.sqrt(3) / 3)
    t.add("bound{z,x}", 2 * two, np.sqrt(2))
    t.add("bound{z,x,y}", 3 * three, np.sqrt(3))
    return t


def mub_table(dims=range(2, 11)) -> Table:
    t = Table("mub", 1e-10)
    for d in dims:
        f = general_nst(mub_pair_assembly(d)).f_nst
        t.add(f"d={d} f_nst", f, 0.5 * (1 + 1 / np.sqrt(d)))
        t.add(f"d={d} g_nst", geometric_from_fidelity(f, d), 0.5 * (1 + 1 / (np.sqrt(d) + 1)))
    return t


def candidates_table() -> Table:
    """Four-vector threshold against its published critical visibility."""
    t = Table("candidates", 1e-4)
    g4 = qubit_nst(four_vector_candidate()).g_nst
    eta = visibility_reference("four_vector")
    t.add("four_vector g_nst", g4, 0.5590)
    t.add("four_vector bound", 4 * g4, np.sqrt(5))
    t.add("four_vector eta_star (reference)", eta, 0.5544)
    t.add("four_vector g_nst - eta_star", g4 - eta, 0.5590 - 0.5544)
    t.add("tetrahedron g_nst", qubit_nst(tetrahedron_family()).g_nst, 0.5774)
    return t


def continuous_table(resolution: int = 64) -> Table:
    t = Table("continuous", 1e-4)
    t.add("circle", continuous_nst(DirectionDensity.uniform_circle()), 2 / np.pi)
    t.add("sphere", continuous_nst(DirectionDensity.uniform_sphere(resolution)), 0.5)
    for name, alpha in (("0", 0.0), ("pi/4", np.pi / 4), ("pi/2", np.pi / 2)):
        rho_plus, _, p_plus, _ = planar_lhs_witness(alpha, 4096)
        t.add(f"lhs alpha={name} bloch_length", np.linalg.norm(density_to_bloch(2 * rho_plus)), 2 / np.pi)
        t.add(f"lhs alpha={name} p_plus", p_plus, 0.5)
    return t


def _bisect_flag(steerable, lo=0.0, hi=1.0, tol=1e-12) -> float:
    """Smallest eta at which ``steerable(eta)`` turns true (monotone flag)."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if steerable(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def werner_table(resolution: int = 64) -> Table:
    t = Table("werner", 1e-4)
    for label, bob, ref in (
        ("verdict mub_pair", qubit_assembly([[0, 0, 1], [1, 0, 0]]), np.sqrt(2) / 2),
        ("verdict three_axes", qubit_assembly([[0, 0, 1], [1, 0, 0], [0, 1, 0]]), np.sqrt(3) / 3),
    ):
        alice = bob.conjugate()
        thr = general_nst(bob)
        eta = _bisect_flag(lambda e: verdict(isotropic_state(2, e), alice, bob, thr).steerable)
        t.add(label, eta, ref)
    t.add("R2", _bisect_flag(lambda e: r2_criterion(isotropic_state(2, e)).steerable), np.sqrt(2) / 2)
    t.add("R3", _bisect_flag(lambda e: r3_criterion(isotropic_state(2, e)).steerable), np.sqrt(3) / 3)
    crossing = brentq(
        lambda e: r_infinity_criterion(isotropic_state(2, e), resolution).value - 1.0, 0.3, 0.7, xtol=1e-7
    )
    t.add("Rinf", crossing, 0.5)
    return t


def build_tables(resolution: int = 64) -> list[Table]:
    return [
        planar_table(),
        criteria_table(),
        mub_table(),
        candidates_table(),
        continuous_table(resolution),
        werner_table(resolution),
    ]


def write_tables(tables: list[Table], out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [t.write(out) for t in tables]
    summary = out / "summary.csv"
    with summary.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("table", "rows", "max_abs_error", "tolerance", "passed"))
        for t in tables:
            writer.writerow((t.name, len(t.rows), f"{t.max_error:.3e}", f"{t.tolerance:.0e}", str(t.passed).lower()))
    return paths + [summary]
