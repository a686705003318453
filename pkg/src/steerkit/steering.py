"""States, assemblages, averaged fidelities and steering verdicts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, QuadratureError
from .linalg import (
    I2,
    PAULI,
    BipartiteState,
    check_hermitian,
    jacobi_eigh,
    partial_transpose_B,
    pauli_dot,
)
from .measurements import MeasurementAssembly
from .thresholds import ThresholdReport, general_nst, geometric_from_fidelity

STEER_MARGIN = 1e-12
ASSEMBLAGE_TOL = 1e-10


def max_entangled_vector(d: int) -> np.ndarray:
    psi = np.zeros(d * d, dtype=complex)
    psi[:: d + 1] = 1.0 / np.sqrt(d)
    return psi


def isotropic_state(d: int, eta: float) -> BipartiteState:
    """``eta |phi+><phi+| + (1 - eta) I / d^2``; the Werner state for ``d = 2``."""
    if int(d) != d or d < 2:
        raise InputError(f"isotropic state needs d >= 2, got {d!r}")
    d = int(d)
    lo = -1.0 / (d * d - 1)
    if not (lo - 1e-12 <= eta <= 1.0 + 1e-12):
        raise InputError(f"eta = {eta!r} outside the positivity range [{lo:.6g}, 1]")
    psi = max_entangled_vector(d)
    m = eta * np.outer(psi, psi.conj()) + (1.0 - eta) * np.eye(d * d) / d**2
    return BipartiteState(m, (d, d))


werner_state = isotropic_state


def pure_state(gamma: float) -> BipartiteState:
    """``cos(gamma/2)|00> + sin(gamma/2)|11>``."""
    psi = np.zeros(4, dtype=complex)
    psi[0] = np.cos(gamma / 2)
    psi[3] = np.sin(gamma / 2)
    return BipartiteState(np.outer(psi, psi.conj()), (2, 2))


def product_state(rho_a, rho_b) -> BipartiteState:
    rho_a = np.asarray(rho_a, dtype=complex)
    rho_b = np.asarray(rho_b, dtype=complex)
    return BipartiteState(np.kron(rho_a, rho_b), (rho_a.shape[0], rho_b.shape[0]))


def depolarize(a, eta: float, d: int | None = None) -> np.ndarray:
    """``eta A + (1 - eta) Tr(A) I/d``."""
    a = check_hermitian(a)
    d = a.shape[0] if d is None else d
    if a.shape[0] != d:
        raise InputError(f"operator has dimension {a.shape[0]}, expected {d}")
    if not (0.0 <= eta <= 1.0):
        raise InputError(f"eta = {eta!r} outside [0, 1]")
    return eta * a + (1.0 - eta) * np.trace(a) * np.eye(d) / d


@dataclass(frozen=True, eq=False)
class Assemblage:
    """Unnormalized conditional states ``entries[mu, a]`` held by Bob."""

    entries: np.ndarray  # (N, d_outcomes, d_B, d_B)

    def __post_init__(self):
        e = np.array(self.entries, dtype=complex)
        if e.ndim != 4 or e.shape[2] != e.shape[3]:
            raise InputError(f"assemblage entries must have shape (N, k, d, d), got {e.shape}")
        if np.max(np.abs(e - e.conj().swapaxes(-1, -2))) > ASSEMBLAGE_TOL:
            raise InputError("assemblage entries must be Hermitian")
        if jacobi_eigh(e)[0].min() < -ASSEMBLAGE_TOL:
            raise InputError("assemblage entries must be positive semidefinite")
        marginals = e.sum(axis=1)
        if np.max(np.abs(marginals - marginals[0])) > ASSEMBLAGE_TOL:
            raise InputError("assemblage violates no-signaling")
        if np.max(np.abs(np.trace(marginals, axis1=1, axis2=2) - 1.0)) > ASSEMBLAGE_TOL:
            raise InputError("assemblage outcome probabilities do not sum to 1")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def n_settings(self) -> int:
        return self.entries.shape[0]

    @property
    def probabilities(self) -> np.ndarray:
        return np.real(np.trace(self.entries, axis1=2, axis2=3))

    @property
    def reduced_state(self) -> np.ndarray:
        return self.entries[0].sum(axis=0)


def _check_alice(w: BipartiteState, alice: MeasurementAssembly):
    if alice.dim != w.dims[0]:
        raise InputError(f"Alice's measurements have dim {alice.dim}, state has d_A = {w.dims[0]}")


def assemblage_from_state(w: BipartiteState, alice: MeasurementAssembly) -> Assemblage:
    """``rho~^a_mu = Tr_A[(Pi^a_mu (x) I) w]``."""
    _check_alice(w, alice)
    da, db = w.dims
    wr = w.matrix.reshape(da, db, da, db)
    entries = np.einsum("noik,kaib->noab", alice.projector_stack(), wr)
    return Assemblage(entries)


def averaged_fidelity(w: BipartiteState, alice: MeasurementAssembly, bob: MeasurementAssembly) -> float:
    """``F_avg = sum_mu q_mu sum_a Tr[w (Pi^a_mu (x) Phi^a_mu)]`` with Bob's weights.

    Alice's setting ``mu`` is paired with Bob's setting ``mu`` and outcomes
    are matched by index.
    """
    _check_alice(w, alice)
    if bob.dim != w.dims[1]:
        raise InputError(f"Bob's measurements have dim {bob.dim}, state has d_B = {w.dims[1]}")
    if alice.n_settings != bob.n_settings:
        raise InputError(f"setting count mismatch: Alice {alice.n_settings}, Bob {bob.n_settings}")
    if alice.dim != bob.dim:
        raise InputError("Alice and Bob need the same number of outcomes to pair them")
    ent = assemblage_from_state(w, alice).entries
    per_setting = np.real(np.einsum("naij,naji->n", ent, bob.projector_stack()))
    return float(bob.weights @ per_setting)


@dataclass(frozen=True)
class SteeringVerdict:
    f_avg: float
    f_nst: float
    g_avg: float
    g_nst: float
    ratio: float
    steerable: bool

    def to_json(self) -> dict:
        return {
            "f_avg": self.f_avg,
            "f_nst": self.f_nst,
            "g_avg": self.g_avg,
            "g_nst": self.g_nst,
            "ratio": self.ratio,
            "steerable": self.steerable,
        }


def verdict(
    w: BipartiteState,
    alice: MeasurementAssembly,
    bob: MeasurementAssembly,
    threshold: ThresholdReport | None = None,
) -> SteeringVerdict:
    """Compare ``F_avg`` with Bob's nonsteering threshold; steerable iff strictly above."""
    f = averaged_fidelity(w, alice, bob)
    report = threshold if threshold is not None else general_nst(bob)
    d = bob.dim
    return SteeringVerdict(
        f_avg=f,
        f_nst=report.f_nst,
        g_avg=geometric_from_fidelity(f, d, check=False),
        g_nst=report.g_nst,
        ratio=f / report.f_nst,
        steerable=bool(f > report.f_nst + STEER_MARGIN),
    )


def is_npt(w: BipartiteState, tol: float = 1e-12) -> bool:
    """True when the partial transpose has a negative eigenvalue (two qubits)."""
    if w.dims != (2, 2):
        raise InputError("partial-transpose check is implemented for two qubits only")
    return bool(jacobi_eigh(partial_transpose_B(w))[0][0] < -tol)


FOUR_VECTOR_ETA_STAR = 0.5544


def visibility_reference(kind: str, theta: float | None = None, d: int | None = None) -> float:
    """Published critical visibilities; nothing is solved here.

    ``"rotated_pair"`` (needs ``theta``): ``1 / (|cos theta| + |sin theta|)``.
    ``"mub_pair"`` (needs ``d``): ``(1 + 1/(sqrt(d) + 1)) / 2``.
    ``"four_vector"``: 0.5544.
    """
    if kind == "rotated_pair":
        if theta is None:
            raise InputError("rotated_pair needs theta")
        return 1.0 / (abs(np.cos(theta)) + abs(np.sin(theta)))
    if kind == "mub_pair":
        if d is None or d < 2:
            raise InputError("mub_pair needs d >= 2")
        return 0.5 * (1.0 + 1.0 / (np.sqrt(d) + 1.0))
    if kind == "four_vector":
        return FOUR_VECTOR_ETA_STAR
    raise InputError(f"unknown visibility reference {kind!r}")


@dataclass(frozen=True, eq=False)
class LhsModel:
    """Discretized local hidden state model on a circle of hidden angles."""

    angles: np.ndarray  # hidden variables phi_k
    weights: np.ndarray  # omega(phi_k) dphi, sums to 1
    local_states: np.ndarray  # (K, 2, 2)
    responses: np.ndarray  # (K, outcomes): p(a | phi_k) for one setting

    def __post_init__(self):
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise InputError("hidden-variable weights must sum to 1")
        if np.max(np.abs(self.responses.sum(axis=1) - 1.0)) > 1e-12:
            raise InputError("responses must be normalized for every hidden variable")

    def conditional_states(self) -> np.ndarray:
        """``sum_k omega_k p(a|phi_k) rho_k`` for each outcome ``a``."""
        return np.einsum("k,ka,kij->aij", self.weights, self.responses, self.local_states)

    def probabilities(self) -> np.ndarray:
        return self.weights @ self.responses


def planar_lhs_model(alpha: float, resolution: int) -> LhsModel:
    """Equatorial local states with half-circle responses centred on ``alpha``.

    The midpoint grid is offset so that both half-circle boundaries fall
    between nodes, which keeps the indicator responses exact.
    """
    if resolution < 64 or resolution % 2:
        raise InputError(f"resolution must be an even integer >= 64, got {resolution!r}")
    h = 2.0 * np.pi / resolution
    phi = alpha - np.pi / 2 + (np.arange(resolution) + 0.5) * h
    bloch = np.stack([np.cos(phi), np.sin(phi), np.zeros_like(phi)], axis=1)
    states = 0.5 * (I2[None] + np.einsum("kx,xij->kij", bloch, PAULI))
    plus = (np.cos(phi - alpha) > 0).astype(float)
    return LhsModel(
        angles=np.mod(phi, 2 * np.pi),
        weights=np.full(resolution, 1.0 / resolution),
        local_states=states,
        responses=np.stack([plus, 1.0 - plus], axis=1),
    )


LHS_TOL = 1e-4


def planar_lhs_witness(alpha: float, resolution: int = 4096):
    """Rebuild ``(I +- (2/pi) n(alpha).sigma) / 4`` from the planar LHS model.

    Returns ``(rho_plus, rho_minus, p_plus, p_minus)``. Raises
    :class:`QuadratureError` if the reconstruction misses the target by more
    than ``1e-4`` (max entry) or the probabilities miss 1/2.
    """
    model = planar_lhs_model(alpha, resolution)
    rho_plus, rho_minus = model.conditional_states()
    p_plus, p_minus = model.probabilities()
    n = pauli_dot([np.cos(alpha), np.sin(alpha), 0.0])
    target_plus = 0.25 * (I2 + (2 / np.pi) * n)
    target_minus = 0.25 * (I2 - (2 / np.pi) * n)
    err = max(
        np.max(np.abs(rho_plus - target_plus)),
        np.max(np.abs(rho_minus - target_minus)),
        abs(p_plus - 0.5),
        abs(p_minus - 0.5),
    )
    if err > LHS_TOL:
        raise QuadratureError(f"LHS reconstruction error {err:.2e} exceeds {LHS_TOL:g}")
    return rho_plus, rho_minus, float(p_plus), float(p_minus)
