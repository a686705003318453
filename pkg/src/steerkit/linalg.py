"""Small dense linear algebra for qubits and qudits.

Operators are plain ``numpy`` complex arrays. Validation helpers raise
:class:`~steerkit.errors.InputError`; everything else is a pure function.
Subsystem order is Alice first, Bob second; Pauli order is (x, y, z).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InputError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])
for _m in (I2, SIGMA_X, SIGMA_Y, SIGMA_Z, PAULI):
    _m.setflags(write=False)


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a square complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InputError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    return m


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(a, dtype=complex)
    return bool(np.max(np.abs(m - m.conj().swapaxes(-1, -2)), initial=0.0) <= tol)


def check_hermitian(a, tol: float = HERMITIAN_TOL, name: str = "operator") -> np.ndarray:
    m = as_matrix(a, name)
    if not is_hermitian(m, tol):
        raise InputError(f"{name} is not Hermitian within {tol:g}")
    return m


def check_density(rho, name: str = "density operator") -> np.ndarray:
    """Validate ``rho`` as Hermitian, unit trace and positive semidefinite."""
    m = check_hermitian(rho, name=name)
    tr = np.trace(m).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise InputError(f"{name} has trace {tr!r}, expected 1")
    lam_min = jacobi_eigh(m)[0][0]
    if lam_min < -POSITIVITY_TOL:
        raise InputError(f"{name} has negative eigenvalue {lam_min:.3e}")
    return m


def is_unitary(u, tol: float = 1e-10) -> bool:
    m = np.asarray(u, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))) <= tol)


def check_unitary(u, tol: float = 1e-10) -> np.ndarray:
    m = as_matrix(u, "unitary")
    if not is_unitary(m, tol):
        raise InputError(f"matrix is not unitary within {tol:g}")
    return m


def kron(a, b) -> np.ndarray:
    """Tensor product with ``a`` as the leading (Alice) factor."""
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """A density operator on ``C^dA (x) C^dB``."""

    matrix: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self):
        dims = tuple(int(x) for x in self.dims)
        if len(dims) != 2 or min(dims) < 1:
            raise InputError(f"dims must be two positive integers, got {self.dims!r}")
        m = as_matrix(self.matrix, "state")
        if m.shape[0] != dims[0] * dims[1]:
            raise InputError(
                f"state has dimension {m.shape[0]} but dims {dims} multiply to {dims[0] * dims[1]}"
            )
        m = check_density(m, "state")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def mixture(states, weights) -> BipartiteState:
    weights = np.asarray(weights, dtype=float)
    dims = states[0].dims
    return BipartiteState(sum(w * s.matrix for w, s in zip(weights, states)), dims)


def _split(w: BipartiteState) -> np.ndarray:
    if not isinstance(w, BipartiteState):
        raise InputError("expected a BipartiteState")
    da, db = w.dims
    if w.matrix.shape != (da * db, da * db):
        raise InputError("declared dims do not match the matrix size")
    return w.matrix.reshape(da, db, da, db)


def partial_trace_A(w: BipartiteState) -> np.ndarray:
    """Bob's reduced state ``Tr_A[w]``."""
    return np.einsum("ijik->jk", _split(w))


def partial_trace_B(w: BipartiteState) -> np.ndarray:
    return np.einsum("ijkj->ik", _split(w))


def partial_transpose_B(w: BipartiteState) -> np.ndarray:
    da, db = w.dims
    return _split(w).transpose(0, 3, 2, 1).reshape(da * db, da * db)


def jacobi_eigh(h, tol: float = 1e-12, max_sweeps: int = 64):
    """Eigen-decomposition of Hermitian matrices by cyclic Jacobi rotations.

    ``h`` may be a single ``(d, d)`` matrix or a stack ``(..., d, d)``; the
    whole stack is rotated in lock-step. Sweeps continue until the
    off-diagonal Frobenius norm of every matrix is below
    ``tol * max(1, ||h||_F)``.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending along
    the last axis and eigenvectors as columns, like ``numpy.linalg.eigh``.
    """
    a = np.array(h, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise InputError(f"expected square matrices, got shape {a.shape}")
    d = a.shape[-1]
    batch = a.shape[:-2]
    a = a.reshape((-1, d, d))
    if not is_hermitian(a, max(HERMITIAN_TOL, HERMITIAN_TOL * np.max(np.abs(a), initial=0.0))):
        raise InputError("jacobi_eigh needs Hermitian input")
    a = 0.5 * (a + a.conj().transpose(0, 2, 1))
    v = np.broadcast_to(np.eye(d, dtype=complex), a.shape).copy()
    scale = np.maximum(1.0, np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2))))
    offmask = ~np.eye(d, dtype=bool)
    negligible = np.finfo(float).eps ** 2 * scale

    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a[:, offmask]) ** 2, axis=1))
        if np.all(off <= tol * scale):
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                b = a[:, p, q]
                absb = np.abs(b)
                # entries this small are already converged; rotating them risks subnormal overflow
                live = absb > negligible
                if not np.any(live):
                    continue
                absb = np.where(live, absb, 0.0)
                safe = np.where(live, absb, 1.0)
                phase = np.where(live, b.real / safe + 1j * (b.imag / safe), 1.0)
                theta = 0.5 * np.arctan2(2.0 * absb, a[:, p, p].real - a[:, q, q].real)
                theta = np.where(live, theta, 0.0)
                c = np.cos(theta)[:, None]
                s = np.sin(theta)[:, None]
                ph = phase.conj()[:, None]
                # columns: A <- A G with G = [[c, -s], [s ph, c ph]]
                cp, cq = a[:, :, p].copy(), a[:, :, q]
                a[:, :, p] = c * cp + s * ph * cq
                a[:, :, q] = -s * cp + c * ph * cq
                rp, rq = a[:, p, :].copy(), a[:, q, :]
                a[:, p, :] = c * rp + s * ph.conj() * rq
                a[:, q, :] = -s * rp + c * ph.conj() * rq
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
                vp, vq = v[:, :, p].copy(), v[:, :, q]
                v[:, :, p] = c * vp + s * ph * vq
                v[:, :, q] = -s * vp + c * ph * vq
    else:
        off = np.sqrt(np.sum(np.abs(a[:, offmask]) ** 2, axis=1))
        if not np.all(off <= tol * scale):
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")

    lam = np.real(np.diagonal(a, axis1=1, axis2=2))
    order = np.argsort(lam, axis=1, kind="stable")
    lam = np.take_along_axis(lam, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return lam.reshape(batch + (d,)), v.reshape(batch + (d, d))


def max_eigenvalues(stack) -> np.ndarray:
    """Largest eigenvalue of each Hermitian matrix in ``stack``."""
    return jacobi_eigh(stack)[0][..., -1]


def herm_eig_max(h) -> tuple[float, np.ndarray]:
    """Largest eigenvalue of a Hermitian matrix and a unit eigenvector."""
    m = check_hermitian(h, tol=max(HERMITIAN_TOL, HERMITIAN_TOL * np.max(np.abs(np.asarray(h)))))
    lam, vecs = jacobi_eigh(m)
    vec = vecs[:, -1]
    return float(lam[-1]), vec / np.linalg.norm(vec)


def check_bloch(r, unit: bool = False) -> np.ndarray:
    v = np.asarray(r, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise InputError(f"Bloch vector must be a finite real 3-vector, got {r!r}")
    n = np.linalg.norm(v)
    if unit and abs(n - 1.0) > 1e-12:
        raise InputError(f"axis must have unit length, |n| = {n!r}")
    if not unit and n > 1.0 + 1e-12:
        raise InputError(f"Bloch vector length {n!r} exceeds 1")
    return v


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def pauli_dot(n) -> np.ndarray:
    """``n . sigma`` for a real 3-vector ``n``."""
    return np.tensordot(np.asarray(n, dtype=float), PAULI, axes=1)


def bloch_to_density(r) -> np.ndarray:
    return 0.5 * (I2 + pauli_dot(check_bloch(r)))


def density_to_bloch(rho) -> np.ndarray:
    m = as_matrix(rho, "rho")
    if m.shape != (2, 2):
        raise InputError(f"Bloch conversion needs a 2x2 operator, got {m.shape}")
    return np.real(np.einsum("ij,kji->k", m, PAULI))


def expectation(w: BipartiteState, a, b) -> float:
    """``Tr[w (a (x) b)]`` for Hermitian ``a`` on Alice and ``b`` on Bob."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if (a.shape[0], b.shape[0]) != w.dims:
        raise InputError(f"operator dims {(a.shape[0], b.shape[0])} do not match state dims {w.dims}")
    val = np.trace(w.matrix @ np.kron(a, b))
    if abs(val.imag) > 1e-9:
        raise InputError(f"expectation has imaginary part {val.imag:.3e}; operators not Hermitian?")
    return float(val.real)


def correlation_tensor(w: BipartiteState) -> np.ndarray:
    """``t_ij = Tr[w sigma_i (x) sigma_j]`` for a two-qubit state."""
    if w.dims != (2, 2):
        raise InputError(f"correlation tensor needs a two-qubit state, got dims {w.dims}")
    pp = np.einsum("iab,jcd->ijacbd", PAULI, PAULI).reshape(3, 3, 4, 4)
    return np.real(np.einsum("xy,ijyx->ij", w.matrix, pp))
