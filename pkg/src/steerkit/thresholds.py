"""Nonsteering thresholds of Bob's target measurements.

The fidelity threshold ``F_NST`` is the largest eigenvalue of

    rho_bar = sum_mu q_mu Phi^{a(mu)}_mu

maximized over deterministic responses ``a(mu)``. Its geometric form is
``g_NST = (d F_NST - 1) / (d - 1)``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BudgetExceeded, InputError, QuadratureError
from .linalg import I2, check_unitary, max_eigenvalues, pauli_dot
from .measurements import MeasurementAssembly, planar_family, unitary_pair_assembly
from .sphere import circle_rule, maximize_projection, sphere_rule

QUBIT_BUDGET_SETTINGS = 24
GENERAL_BUDGET = 10**7
TIE_TOL = 1e-12
CHUNK = 1 << 15


def worker_count() -> int:
    """Worker cap from ``STEERKIT_THREADS`` (default 1)."""
    raw = os.environ.get("STEERKIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class DeterministicResponse:
    """One outcome index per setting, 0-based."""

    assignments: tuple[int, ...]

    def one_based(self) -> list[int]:
        return [a + 1 for a in self.assignments]

    def signs(self) -> list[int]:
        """Qubit sign vector: outcome 0 -> +1, outcome 1 -> -1."""
        return [1 - 2 * a for a in self.assignments]


@dataclass(frozen=True, eq=False)
class ThresholdReport:
    f_nst: float
    g_nst: float
    maximizer: DeterministicResponse
    rho_bar: np.ndarray
    dim: int

    def to_json(self) -> dict:
        return {
            "f_nst": self.f_nst,
            "g_nst": self.g_nst,
            "maximizer": self.maximizer.one_based(),
        }


def geometric_from_fidelity(f: float, d: int, check: bool = True) -> float:
    """Affine map ``(d f - 1) / (d - 1)`` from fidelity to the visibility scale."""
    if d < 2:
        raise InputError(f"dimension must be >= 2, got {d}")
    if check and not (1.0 / d - 1e-12 <= f <= 1.0 + 1e-12):
        raise InputError(f"fidelity {f!r} outside [1/d, 1]")
    return (d * f - 1.0) / (d - 1.0)


def fidelity_from_geometric(g: float, d: int) -> float:
    return (g * (d - 1.0) + 1.0) / d


def _index_digits(idx: np.ndarray, base: int, length: int) -> np.ndarray:
    powers = base ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % base


def _argmax_first(values: np.ndarray) -> int:
    """First index whose value ties the maximum within ``TIE_TOL``."""
    top = values.max()
    return int(np.flatnonzero(values >= top - TIE_TOL)[0])


def _chunk_reduce(total: int, evaluate) -> tuple[float, int]:
    """Max-reduce ``evaluate(start, stop) -> values`` over ``range(total)``.

    Chunks may run on several threads; ties resolve to the smallest index,
    so the result does not depend on worker count.
    """
    starts = list(range(0, total, CHUNK))

    def run(start):
        vals = evaluate(start, min(start + CHUNK, total))
        i = _argmax_first(vals)
        return float(vals[i]), start + i

    workers = min(worker_count(), len(starts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(s) for s in starts]
    best_val, best_idx = results[0]
    for val, idx in results[1:]:
        if val > best_val + TIE_TOL:
            best_val, best_idx = val, idx
    return best_val, best_idx


def qubit_nst(assembly: MeasurementAssembly, max_settings: int = QUBIT_BUDGET_SETTINGS) -> ThresholdReport:
    """Exact qubit threshold ``g = max_s |sum_mu q_mu s_mu n_mu|``.

    The global flip ``s -> -s`` leaves ``|r|`` unchanged, so the first sign
    is pinned to ``+`` and only ``2^(N-1)`` patterns are scanned.
    """
    if assembly.dim != 2:
        raise InputError(f"qubit_nst needs qubit measurements, got dim {assembly.dim}")
    n = assembly.n_settings
    if n > max_settings:
        raise BudgetExceeded(f"{n} settings exceed the qubit enumeration budget of {max_settings}")
    wn = assembly.weights[:, None] * assembly.axes()

    def evaluate(start, stop):
        bits = _index_digits(np.arange(start, stop, dtype=np.int64), 2, n - 1)
        signs = np.concatenate([np.ones((len(bits), 1)), 1.0 - 2.0 * bits], axis=1)
        return np.linalg.norm(signs @ wn, axis=1)

    g, idx = _chunk_reduce(1 << (n - 1), evaluate)
    assignment = (0,) + tuple(int(b) for b in _index_digits(np.array([idx]), 2, n - 1)[0])
    signs = 1.0 - 2.0 * np.array(assignment)
    r = signs @ wn
    return ThresholdReport(
        f_nst=(1.0 + g) / 2.0,
        g_nst=g,
        maximizer=DeterministicResponse(assignment),
        rho_bar=0.5 * (I2 + pauli_dot(r)),
        dim=2,
    )


def general_nst(assembly: MeasurementAssembly, budget: int = GENERAL_BUDGET) -> ThresholdReport:
    """Exact threshold by enumerating all ``d^N`` deterministic responses."""
    d, n = assembly.dim, assembly.n_settings
    total = d**n
    if total > budget:
        raise BudgetExceeded(f"{d}^{n} = {total} responses exceed the enumeration budget of {budget}")
    weighted = assembly.weights[:, None, None, None] * assembly.projector_stack()
    settings = np.arange(n)

    def evaluate(start, stop):
        digits = _index_digits(np.arange(start, stop, dtype=np.int64), d, n)
        rho = weighted[settings[None, :], digits].sum(axis=1)
        return max_eigenvalues(rho)

    f, idx = _chunk_reduce(total, evaluate)
    assignment = tuple(int(a) for a in _index_digits(np.array([idx]), d, n)[0])
    rho_bar = weighted[settings, list(assignment)].sum(axis=0)
    return ThresholdReport(
        f_nst=f,
        g_nst=geometric_from_fidelity(f, d),
        maximizer=DeterministicResponse(assignment),
        rho_bar=rho_bar,
        dim=d,
    )


def two_setting_nst_from_unitary(u) -> float:
    """Fidelity threshold ``(1 + max_ab |U_ab|) / 2`` of a basis pair related by ``u``."""
    u = check_unitary(u)
    return 0.5 * (1.0 + float(np.max(np.abs(u))))


def planar_nst(n_settings: int) -> float:
    return qubit_nst(planar_family(n_settings)).g_nst


def planar_nst_closed_form(n_settings: int) -> float:
    """``(1/N) max_alpha sum_k |cos(k pi/N - alpha)|`` evaluated arc by arc.

    Between consecutive kinks the sum is ``Re(Z e^{-i alpha})`` for a fixed
    phasor ``Z``, so each arc contributes either ``|Z|`` or an endpoint value.
    """
    n = int(n_settings)
    if n < 2:
        raise InputError(f"planar family needs n_settings >= 2, got {n_settings!r}")
    ang = np.arange(n) * np.pi / n
    kinks = np.sort(np.mod(ang + np.pi / 2, np.pi))
    edges = np.concatenate([kinks, [kinks[0] + np.pi]])

    def total(alpha):
        return np.sum(np.abs(np.cos(ang - alpha)))

    best = max(total(a) for a in edges)
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        z = np.sum(np.sign(np.cos(ang - mid)) * np.exp(1j * ang))
        peak = np.mod(np.angle(z) - lo, 2 * np.pi) + lo
        if lo <= peak <= hi:
            best = max(best, abs(z))
    return float(best / n)


@dataclass(frozen=True, eq=False)
class DirectionDensity:
    """A probability density of Bob's measurement axes.

    kind:
      ``"circle"``   uniform on the x-y great circle,
      ``"sphere"``   uniform on the Bloch sphere,
      ``"weighted"`` on the sphere with density proportional to ``|t n|``,
      ``"discrete"`` point masses ``weights`` on ``axes``.
    """

    kind: str
    correlation: np.ndarray | None = None
    axes: np.ndarray | None = None
    weights: np.ndarray | None = None
    n_theta: int = 64
    n_phi: int = 128
    n_circle: int = 4096

    def __post_init__(self):
        if self.kind not in ("circle", "sphere", "weighted", "discrete"):
            raise InputError(f"unknown density kind {self.kind!r}")
        if self.kind == "weighted":
            t = np.asarray(self.correlation, dtype=float)
            if t.shape != (3, 3):
                raise InputError("weighted density needs a 3x3 correlation matrix")
            if not np.any(t):
                raise InputError("weighted density with a vanishing correlation matrix is undefined")
        if self.kind == "discrete":
            axes = np.asarray(self.axes, dtype=float)
            w = np.asarray(self.weights, dtype=float)
            if axes.ndim != 2 or axes.shape[1] != 3 or w.shape != (len(axes),):
                raise InputError("discrete density needs (N, 3) axes and N weights")
        pts, wts = self.rule()
        if abs(wts.sum() - 1.0) > 1e-6 or np.any(wts < 0):
            raise InputError("direction density does not integrate to 1")

    @classmethod
    def uniform_circle(cls, n: int = 4096) -> "DirectionDensity":
        return cls("circle", n_circle=n)

    @classmethod
    def uniform_sphere(cls, n_theta: int = 64, n_phi: int | None = None) -> "DirectionDensity":
        return cls("sphere", n_theta=n_theta, n_phi=n_phi or 2 * n_theta)

    @classmethod
    def weighted_by(cls, t, n_theta: int = 64, n_phi: int | None = None) -> "DirectionDensity":
        return cls("weighted", correlation=np.asarray(t, dtype=float), n_theta=n_theta, n_phi=n_phi or 2 * n_theta)

    @classmethod
    def discrete(cls, axes, weights) -> "DirectionDensity":
        return cls("discrete", axes=np.asarray(axes, dtype=float), weights=np.asarray(weights, dtype=float))

    @property
    def exact(self) -> bool:
        return self.kind == "discrete"

    def doubled(self) -> "DirectionDensity":
        return replace(self, n_theta=2 * self.n_theta, n_phi=2 * self.n_phi, n_circle=2 * self.n_circle)

    def rule(self) -> tuple[np.ndarray, np.ndarray]:
        """Quadrature ``(points, weights)`` with ``sum(weights) == 1``."""
        if self.kind == "circle":
            return circle_rule(self.n_circle)
        if self.kind == "discrete":
            return np.asarray(self.axes, dtype=float), np.asarray(self.weights, dtype=float)
        pts, wts = sphere_rule(self.n_theta, self.n_phi)
        if self.kind == "weighted":
            q = np.linalg.norm(pts @ np.asarray(self.correlation, dtype=float).T, axis=1)
            wts = wts * q
            wts = wts / wts.sum()
        return pts, wts


@dataclass(frozen=True)
class ContinuousThreshold:
    g_nst: float
    direction: np.ndarray = field(repr=False)
    error_estimate: float


CONTINUOUS_TOL = 1e-4


def continuous_threshold(density: DirectionDensity, tol: float = CONTINUOUS_TOL) -> ContinuousThreshold:
    """``g = max_u  E_q |n . u|`` with a resolution-doubling error estimate.

    The value is reported at the doubled resolution; the gap to the base
    resolution is the error estimate and must not exceed ``tol``.
    """
    pts, wts = density.rule()
    g, u = maximize_projection(pts, wts)
    if density.exact:
        return ContinuousThreshold(g, u, 0.0)
    pts2, wts2 = density.doubled().rule()
    g2, u2 = maximize_projection(pts2, wts2, start=u)
    err = abs(g2 - g)
    if err > tol:
        raise QuadratureError(
            f"quadrature cannot certify {tol:g}: base and doubled resolution differ by {err:.2e}"
        )
    return ContinuousThreshold(g2, u2, err)


def continuous_nst(density: DirectionDensity) -> float:
    return continuous_threshold(density).g_nst


def _random_tables(rng: np.random.Generator, samples: int, n: int, d: int) -> np.ndarray:
    return rng.dirichlet(np.ones(d), size=(samples, n))


def probabilistic_oracle(
    assembly: MeasurementAssembly,
    samples: int,
    seed: int,
    include_extremes: bool = False,
) -> float:
    """Largest cross norm over ``samples`` random stochastic response tables.

    Each table draws ``p(.|mu)`` uniformly from the probability simplex.
    With ``include_extremes`` every deterministic table is scanned as well.
    """
    if samples < 1:
        raise InputError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    d, n = assembly.dim, assembly.n_settings
    weighted = assembly.weights[:, None, None, None] * assembly.projector_stack()
    best = -np.inf
    for start in range(0, samples, CHUNK):
        m = min(CHUNK, samples - start)
        p = _random_tables(rng, m, n, d)
        rho = np.einsum("sna,naij->sij", p, weighted)
        best = max(best, float(max_eigenvalues(rho).max()))
    if include_extremes:
        best = max(best, general_nst(assembly).f_nst)
    return best


def unitary_pair_nst(u) -> ThresholdReport:
    """Enumerated threshold of the (computational, ``u``-rotated) basis pair."""
    return general_nst(unitary_pair_assembly(u))
