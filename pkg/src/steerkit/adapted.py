"""State-adapted criteria for two-qubit states.

Everything here is driven by the correlation matrix
``t_ij = Tr[W sigma_i (x) sigma_j]`` (Alice index first). For a Bob axis
``n`` the best Alice correlation is ``max_a a.(t n) = |t n|``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, QuadratureError
from .linalg import BipartiteState, check_bloch, correlation_tensor, expectation, kron, pauli_dot
from .thresholds import DirectionDensity, continuous_threshold

STEER_MARGIN = 1e-12
SV_TIE = 1e-10
_PREFERRED = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])  # z, x, y


def _sign_fix(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    return -v if nz.size and v[nz[0]] < 0 else v


def _complete_basis(vectors: list[np.ndarray], count: int) -> list[np.ndarray]:
    out = list(vectors)
    for cand in _PREFERRED:
        if len(out) == count:
            break
        r = cand - sum(np.dot(cand, u) * u for u in out)
        if np.linalg.norm(r) > 1e-8:
            out.append(r / np.linalg.norm(r))
    return out


def _canonical_right_vectors(s: np.ndarray, vt: np.ndarray) -> np.ndarray:
    """Right singular vectors with a deterministic choice inside tied blocks.

    A tied block's basis is rebuilt by projecting z, x, y (in that order)
    onto the block and orthonormalizing; every vector then gets its first
    nonzero component positive.
    """
    v = vt.T.copy()
    i = 0
    while i < 3:
        j = i + 1
        while j < 3 and abs(s[j] - s[i]) <= SV_TIE * max(1.0, s[i]):
            j += 1
        if j - i > 1:
            block = v[:, i:j]
            proj = block @ block.T
            basis: list[np.ndarray] = []
            for cand in _PREFERRED:
                r = proj @ cand - sum(np.dot(proj @ cand, u) * u for u in basis)
                if np.linalg.norm(r) > 1e-8:
                    basis.append(r / np.linalg.norm(r))
                if len(basis) == j - i:
                    break
            v[:, i:j] = np.stack(basis, axis=1)
        i = j
    return np.stack([_sign_fix(v[:, k]) for k in range(3)], axis=1)


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    t: np.ndarray
    singular_values: np.ndarray  # descending
    bob_axes: np.ndarray  # rows: right singular vectors
    alice_axes: np.ndarray  # rows: matching left singular vectors

    def reconstruct(self) -> np.ndarray:
        return self.alice_axes.T @ np.diag(self.singular_values) @ self.bob_axes


def correlation_from_tensor(t) -> CorrelationMatrix:
    t = np.asarray(t, dtype=float)
    if t.shape != (3, 3):
        raise InputError(f"correlation matrix must be 3x3, got {t.shape}")
    _, s, vt = np.linalg.svd(t)
    v = _canonical_right_vectors(s, vt)
    left = []
    for k in range(3):
        if s[k] > 1e-12:
            u = t @ v[:, k] / s[k]
            left.append(u / np.linalg.norm(u))
    left = _complete_basis(left, 3)
    cm = CorrelationMatrix(t=t, singular_values=s, bob_axes=v.T, alice_axes=np.stack(left))
    resid = np.max(np.abs(cm.reconstruct() - t))
    if resid > 1e-10:
        raise InputError(f"singular value decomposition residual {resid:.2e} too large")
    return cm


def correlation_matrix(w: BipartiteState) -> CorrelationMatrix:
    if w.dims != (2, 2):
        raise InputError(f"adapted criteria need a two-qubit state, got dims {w.dims}")
    return correlation_from_tensor(correlation_tensor(w))


def _tensor(t) -> np.ndarray:
    return t.t if isinstance(t, CorrelationMatrix) else np.asarray(t, dtype=float)


def max_correlation(t, n) -> tuple[float, np.ndarray]:
    """Best correlation ``|t n|`` for Bob axis ``n`` and the Alice axis achieving it."""
    n = check_bloch(n, unit=True)
    tn = _tensor(t) @ n
    val = float(np.linalg.norm(tn))
    if val <= 1e-15:
        return val, np.array([0.0, 0.0, 1.0])
    return val, tn / val


@dataclass(frozen=True, eq=False)
class AdaptedCriterion:
    """Outcome of an adapted criterion; steerable iff ``value > 1``.

    For ``"Rinf"`` the settings form a continuous density, so the weight and
    axis tuples are empty and ``f_avg``/ ``g_nst`` carry the result.
    """

    kind: str
    value: float
    optimal_weights: tuple[float, ...]
    optimal_axes: tuple[np.ndarray, ...]
    optimal_alice_axes: tuple[np.ndarray, ...]
    f_avg: float
    g_nst: float
    error_estimate: float = field(default=0.0)

    def __post_init__(self):
        q = np.asarray(self.optimal_weights, dtype=float)
        if q.size and (np.any(q < 0) or abs(q.sum() - 1.0) > 1e-12):
            raise InputError("criterion weights must be nonnegative and sum to 1")
        if self.value < 0:
            raise InputError("criterion value must be nonnegative")

    @property
    def steerable(self) -> bool:
        return bool(self.value > 1.0 + STEER_MARGIN)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "steerable": self.steerable,
            "f_avg": self.f_avg,
            "g_nst": self.g_nst,
            "optimal_weights": [float(x) for x in self.optimal_weights],
            "optimal_axes": [[float(c) for c in a] for a in self.optimal_axes],
            "optimal_alice_axes": [[float(c) for c in a] for a in self.optimal_alice_axes],
        }


def _finite_criterion(kind: str, cm: CorrelationMatrix, k: int) -> AdaptedCriterion:
    s = cm.singular_values[:k]
    total = s.sum()
    q = s / total if total > 0 else np.full(k, 1.0 / k)
    f_avg = float(q @ s)
    g = float(np.linalg.norm(q))
    return AdaptedCriterion(
        kind=kind,
        value=float(np.sqrt(np.sum(s**2))),
        optimal_weights=tuple(float(x) for x in q),
        optimal_axes=tuple(cm.bob_axes[:k]),
        optimal_alice_axes=tuple(cm.alice_axes[:k]),
        f_avg=f_avg,
        g_nst=g,
    )


def r2_criterion(w: BipartiteState) -> AdaptedCriterion:
    """Two orthogonal Bob settings along the two largest principal axes."""
    return _finite_criterion("R2", correlation_matrix(w), 2)


def r3_criterion(w: BipartiteState) -> AdaptedCriterion:
    """Three orthogonal Bob settings along all principal axes."""
    return _finite_criterion("R3", correlation_matrix(w), 3)


RINF_REL_TOL = 1e-3


def r_infinity_criterion(w: BipartiteState, resolution: int = 64) -> AdaptedCriterion:
    """Continuous settings with density ``q(n)`` proportional to ``|t n|``.

    ``f_avg = E_q |t n|`` and the threshold is the continuous
    ``g = max_u E_q |n.u|`` for the same density.
    """
    if resolution < 32:
        raise InputError(f"resolution must be >= 32, got {resolution}")
    cm = correlation_matrix(w)
    if np.max(np.abs(cm.t)) <= 1e-14:
        return AdaptedCriterion("Rinf", 0.0, (), (), (), 0.0, 0.0)

    def fidelity(density):
        pts, wts = density.rule()
        return float(wts @ np.linalg.norm(pts @ cm.t.T, axis=1))

    density = DirectionDensity.weighted_by(cm.t, n_theta=resolution)
    f1, f2 = fidelity(density), fidelity(density.doubled())
    thr = continuous_threshold(density, tol=np.inf)
    rel = abs(f2 - f1) / f2 + thr.error_estimate / thr.g_nst
    if rel > RINF_REL_TOL:
        raise QuadratureError(f"R_inf quadrature relative error {rel:.2e} exceeds {RINF_REL_TOL:g}")
    return AdaptedCriterion("Rinf", f2 / thr.g_nst, (), (), (), f2, thr.g_nst, rel)


def raw_r2(t, n, n_perp, q_n: float) -> float:
    """Ratio criterion for arbitrary orthogonal Bob axes and weight ``q_n``."""
    q_p = 1.0 - q_n
    a, _ = max_correlation(t, n)
    b, _ = max_correlation(t, n_perp)
    return (q_n * a + q_p * b) / np.hypot(q_n, q_p)


def _check_pair(n, n_perp, q_n, q_perp):
    n = check_bloch(n, unit=True)
    n_perp = check_bloch(n_perp, unit=True)
    if abs(np.dot(n, n_perp)) > 1e-10:
        raise InputError("Bob axes must be orthogonal")
    if q_n <= 0 or q_perp <= 0 or abs(q_n + q_perp - 1.0) > 1e-9:
        raise InputError("weights must be positive and sum to 1")
    return n, n_perp


def mapped_angle(q_n: float, q_perp: float) -> tuple[float, float]:
    """``(|cos theta|, |sin theta|)`` matching the setting weights."""
    norm = np.hypot(q_n, q_perp)
    return q_n / norm, q_perp / norm


def chsh_settings_from_steering(q_n: float, q_perp: float, n, n_perp) -> tuple[np.ndarray, np.ndarray]:
    """Bob's CHSH axes ``n1,2 = +-cos(theta) n + sin(theta) n_perp``."""
    n, n_perp = _check_pair(n, n_perp, q_n, q_perp)
    c, s = mapped_angle(q_n, q_perp)
    return c * n + s * n_perp, -c * n + s * n_perp


def steer_chsh_operator_pair(a_axis, b_axis, n, n_perp, q_n: float, q_perp: float):
    """Steering operator and the CHSH operator built from the mapped settings.

    ``T_steer = (q_n A(x)N + q_perp B(x)N_perp) / sqrt(q_n^2 + q_perp^2)`` and
    ``T_CHSH = [A (x) (n1 - n2).sigma + B (x) (n1 + n2).sigma] / 2``.
    """
    n, n_perp = _check_pair(n, n_perp, q_n, q_perp)
    a = pauli_dot(check_bloch(a_axis, unit=True))
    b = pauli_dot(check_bloch(b_axis, unit=True))
    norm = np.hypot(q_n, q_perp)
    t_steer = (q_n * kron(a, pauli_dot(n)) + q_perp * kron(b, pauli_dot(n_perp))) / norm
    n1, n2 = chsh_settings_from_steering(q_n, q_perp, n, n_perp)
    t_chsh = 0.5 * (kron(a, pauli_dot(n1 - n2)) + kron(b, pauli_dot(n1 + n2)))
    return t_steer, t_chsh


def chsh_value(w: BipartiteState, a_axis, b_axis, n1, n2) -> float:
    """``<a (x) (n1 - n2)> + <b (x) (n1 + n2)>``; local models give at most 2."""
    a = pauli_dot(a_axis)
    b = pauli_dot(b_axis)
    return expectation(w, a, pauli_dot(np.asarray(n1) - n2)) + expectation(w, b, pauli_dot(np.asarray(n1) + n2))


def chsh_from_r2(w: BipartiteState) -> float:
    """CHSH value of the settings mapped from the optimal R2 criterion."""
    crit = r2_criterion(w)
    n, n_perp = crit.optimal_axes
    q_n, q_perp = crit.optimal_weights
    if q_n <= 0 or q_perp <= 0:
        q_n = q_perp = 0.5
    _, a = max_correlation(correlation_matrix(w), n)
    _, b = max_correlation(correlation_matrix(w), n_perp)
    n1, n2 = chsh_settings_from_steering(q_n, q_perp, n, n_perp)
    return chsh_value(w, a, b, n1, n2)
