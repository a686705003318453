"""Rank-one projective measurements and weighted measurement sets.

Outcomes are 0-based internally. For qubits, outcome 0 is ``+`` and
outcome 1 is ``-`` relative to the measurement axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .linalg import I2, check_bloch, check_unitary, density_to_bloch, pauli_dot, unit

PROJECTOR_TOL = 1e-10
WEIGHT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """``d`` mutually orthogonal rank-one projectors summing to the identity."""

    projectors: np.ndarray  # shape (d, d, d), outcome first

    def __post_init__(self):
        p = np.array(self.projectors, dtype=complex)
        if p.ndim != 3 or p.shape[0] != p.shape[1] or p.shape[1] != p.shape[2]:
            raise InputError(f"expected d projectors of size d x d, got shape {p.shape}")
        d = p.shape[0]
        for a in range(d):
            pa = p[a]
            if np.max(np.abs(pa - pa.conj().T)) > PROJECTOR_TOL:
                raise InputError(f"projector {a + 1} is not Hermitian")
            if np.max(np.abs(pa @ pa - pa)) > PROJECTOR_TOL:
                raise InputError(f"projector {a + 1} is not idempotent")
            if abs(np.trace(pa).real - 1.0) > PROJECTOR_TOL:
                raise InputError(f"projector {a + 1} is not rank one (trace {np.trace(pa).real:.6g})")
        gram = np.real(np.einsum("aij,bji->ab", p, p))
        if np.max(np.abs(gram - np.diag(np.diag(gram)))) > PROJECTOR_TOL:
            raise InputError("projectors are not mutually orthogonal")
        if np.max(np.abs(p.sum(axis=0) - np.eye(d))) > PROJECTOR_TOL:
            raise InputError("projectors do not sum to the identity")
        p.setflags(write=False)
        object.__setattr__(self, "projectors", p)

    @property
    def dim(self) -> int:
        return self.projectors.shape[0]

    @property
    def axis(self) -> np.ndarray:
        """Bloch axis of the ``+`` outcome (qubits only)."""
        return density_to_bloch(self.projectors[0])

    def conjugate(self) -> "ProjectiveMeasurement":
        return ProjectiveMeasurement(self.projectors.conj())

    def distance(self, other: "ProjectiveMeasurement") -> float:
        """Projector-wise max-entry distance."""
        if other.dim != self.dim:
            return float("inf")
        return float(np.max(np.abs(self.projectors - other.projectors)))

    def close_to(self, other: "ProjectiveMeasurement", tol: float = PROJECTOR_TOL) -> bool:
        return self.distance(other) <= tol


@dataclass(frozen=True, eq=False)
class MeasurementAssembly:
    """``N`` measurements of equal dimension with setting probabilities ``q``."""

    measurements: tuple[ProjectiveMeasurement, ...]
    weights: np.ndarray

    def __post_init__(self):
        ms = tuple(self.measurements)
        if not ms:
            raise InputError("an assembly needs at least one measurement")
        dims = {m.dim for m in ms}
        if len(dims) != 1:
            raise InputError(f"measurements have mixed dimensions {sorted(dims)}")
        q = np.array(self.weights, dtype=float)
        if q.shape != (len(ms),):
            raise InputError(f"expected {len(ms)} weights, got shape {q.shape}")
        if np.any(q < 0) or abs(q.sum() - 1.0) > WEIGHT_TOL:
            raise InputError("weights must be nonnegative and sum to 1")
        q.setflags(write=False)
        object.__setattr__(self, "measurements", ms)
        object.__setattr__(self, "weights", q)

    @property
    def dim(self) -> int:
        return self.measurements[0].dim

    @property
    def n_settings(self) -> int:
        return len(self.measurements)

    def projector_stack(self) -> np.ndarray:
        """Array of shape ``(N, d, d, d)`` indexed ``[setting, outcome]``."""
        return np.stack([m.projectors for m in self.measurements])

    def axes(self) -> np.ndarray:
        if self.dim != 2:
            raise InputError("Bloch axes exist only for qubit measurements")
        return np.stack([m.axis for m in self.measurements])

    def conjugate(self) -> "MeasurementAssembly":
        """Complex-conjugated projectors, same weights.

        For a state ``|phi+><phi+|`` Alice measuring the conjugate of Bob's
        target basis yields perfectly correlated outcomes.
        """
        return MeasurementAssembly(tuple(m.conjugate() for m in self.measurements), self.weights)

    def with_weights(self, weights) -> "MeasurementAssembly":
        return MeasurementAssembly(self.measurements, weights)


def uniform(measurements) -> MeasurementAssembly:
    ms = tuple(measurements)
    return MeasurementAssembly(ms, np.full(len(ms), 1.0 / len(ms)))


def qubit_measurement(n) -> ProjectiveMeasurement:
    n = check_bloch(n, unit=True)
    s = pauli_dot(n)
    return ProjectiveMeasurement(np.stack([0.5 * (I2 + s), 0.5 * (I2 - s)]))


def qubit_assembly(axes, weights=None) -> MeasurementAssembly:
    """Measurement set along Bloch ``axes``; equal weights by default."""
    axes = np.asarray(axes, dtype=float)
    if axes.ndim != 2 or axes.shape[1] != 3:
        raise InputError(f"axes must be an (N, 3) array, got shape {axes.shape}")
    ms = tuple(qubit_measurement(n) for n in axes)
    if weights is None:
        return uniform(ms)
    return MeasurementAssembly(ms, weights)


def planar_axes(n_settings: int) -> np.ndarray:
    if int(n_settings) != n_settings or n_settings < 2:
        raise InputError(f"planar family needs n_settings >= 2, got {n_settings!r}")
    ang = np.arange(n_settings) * np.pi / n_settings
    return np.stack([np.cos(ang), np.sin(ang), np.zeros_like(ang)], axis=1)


def planar_family(n_settings: int) -> MeasurementAssembly:
    """Equally spaced axes ``cos((mu-1) pi/N) x + sin((mu-1) pi/N) y``."""
    return qubit_assembly(planar_axes(n_settings))


FOUR_VECTOR_AXES = np.array(
    [
        [0.0, 0.0, 1.0],
        [-0.5, np.sqrt(3) / 2, 0.0],
        [1.0, 0.0, 0.0],
        [-0.5, -np.sqrt(3) / 2, 0.0],
    ]
)
FOUR_VECTOR_AXES.setflags(write=False)


def four_vector_candidate() -> MeasurementAssembly:
    """The z axis plus three equally spaced axes in the x-y plane."""
    return qubit_assembly(FOUR_VECTOR_AXES)


def tetrahedron_family() -> MeasurementAssembly:
    """Four axes through the vertices of a regular tetrahedron."""
    v = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / np.sqrt(3)
    return qubit_assembly(v)


def basis_from_unitary(u) -> ProjectiveMeasurement:
    """Basis ``|phi_b> = sum_a U_ba |a>``: row ``b`` of ``u`` is vector ``b``."""
    u = check_unitary(u)
    return ProjectiveMeasurement(np.einsum("bi,bj->bij", u, u.conj()))


def computational_basis(d: int) -> ProjectiveMeasurement:
    return basis_from_unitary(np.eye(d))


def fourier_matrix(d: int) -> np.ndarray:
    k = np.arange(d)
    return np.exp(2j * np.pi * np.outer(k, k) / d) / np.sqrt(d)


def fourier_mub_pair(d: int) -> tuple[ProjectiveMeasurement, ProjectiveMeasurement]:
    """Computational and discrete-Fourier bases, unbiased for every ``d``."""
    if int(d) != d or d < 2:
        raise InputError(f"MUB pair needs d >= 2, got {d!r}")
    d = int(d)
    return computational_basis(d), basis_from_unitary(fourier_matrix(d))


def mub_pair_assembly(d: int) -> MeasurementAssembly:
    return uniform(fourier_mub_pair(d))


def unitary_pair_assembly(u) -> MeasurementAssembly:
    """Computational basis and the basis rotated by ``u``, weights 1/2 each."""
    u = check_unitary(u)
    return uniform((computational_basis(u.shape[0]), basis_from_unitary(u)))


def rotated_pair(theta: float) -> MeasurementAssembly:
    """Two qubit bases whose kets differ by a rotation of ``theta``.

    On the Bloch sphere the second axis sits at angle ``2 theta`` from z.
    """
    second = np.array([np.sin(2 * theta), 0.0, np.cos(2 * theta)])
    return qubit_assembly([[0.0, 0.0, 1.0], unit(second)])


# ---------------------------------------------------------------- JSON I/O

def _complex_matrix(obj, d: int, what: str) -> np.ndarray:
    """Parse a row-major complex matrix given as nested rows or a flat list of [re, im]."""
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{what}: entries must be [re, im] pairs") from exc
    if arr.shape == (d, d, 2):
        pass
    elif arr.shape == (d * d, 2):
        arr = arr.reshape(d, d, 2)
    else:
        raise InputError(f"{what}: expected a {d}x{d} matrix of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def complex_to_json(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def assembly_from_json(obj) -> MeasurementAssembly:
    """Parse the measurement-set schema.

    Full form: ``{"dim": d, "weights": [...], "measurements": [[P_1, ..., P_d], ...]}``
    with each projector a row-major matrix of ``[re, im]`` pairs.
    Qubit shorthand: ``{"axes": [[x, y, z], ...], "weights": [...]}``.
    Weights default to uniform. Unknown keys are rejected.
    """
    if not isinstance(obj, dict):
        raise InputError("measurement file must hold a JSON object")
    weights = obj.get("weights")
    if "axes" in obj:
        extra = set(obj) - {"axes", "weights", "dim"}
        if extra:
            raise InputError(f"unknown measurement keys: {sorted(extra)}")
        if obj.get("dim", 2) != 2:
            raise InputError("axes shorthand is only valid for dim 2")
        return qubit_assembly(obj["axes"], weights)
    extra = set(obj) - {"dim", "weights", "measurements"}
    if extra:
        raise InputError(f"unknown measurement keys: {sorted(extra)}")
    if "dim" not in obj or "measurements" not in obj:
        raise InputError("measurement file needs 'dim' and 'measurements' (or 'axes')")
    d = obj["dim"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 2:
        raise InputError(f"'dim' must be an integer >= 2, got {d!r}")
    raw = obj["measurements"]
    if not isinstance(raw, list) or not raw:
        raise InputError("'measurements' must be a non-empty list")
    ms = []
    for mu, meas in enumerate(raw, start=1):
        if not isinstance(meas, list) or len(meas) != d:
            raise InputError(f"measurement {mu} must list exactly {d} projectors")
        ms.append(
            ProjectiveMeasurement(
                np.stack([_complex_matrix(p, d, f"measurement {mu} projector {a}") for a, p in enumerate(meas, 1)])
            )
        )
    if weights is None:
        return uniform(ms)
    return MeasurementAssembly(tuple(ms), weights)


def assembly_to_json(assembly: MeasurementAssembly) -> dict:
    return {
        "dim": assembly.dim,
        "weights": [float(q) for q in assembly.weights],
        "measurements": [[complex_to_json(p) for p in m.projectors] for m in assembly.measurements],
    }
