import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from helpers import random_density, random_unit, random_unitary
from steerkit.errors import InputError
from steerkit.linalg import (
    PAULI,
    BipartiteState,
    bloch_to_density,
    check_bloch,
    check_density,
    check_hermitian,
    check_unitary,
    correlation_tensor,
    density_to_bloch,
    expectation,
    herm_eig_max,
    jacobi_eigh,
    max_eigenvalues,
    mixture,
    partial_trace_A,
    partial_trace_B,
    partial_transpose_B,
    pauli_dot,
)
from steerkit.steering import isotropic_state

seeds = st.integers(0, 2**32 - 1)


def charpoly_roots(h):
    """Eigenvalues from sign changes of det(h - x I), refined with brentq."""
    d = h.shape[0]
    bound = np.abs(h).sum() + 1.0

    def f(x):
        return np.linalg.det(h - x * np.eye(d)).real

    grid = np.linspace(-bound, bound, 20001)
    vals = np.array([f(x) for x in grid])
    roots = []
    for i in np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:])):
        roots.append(brentq(f, grid[i], grid[i + 1], xtol=1e-14))
    return np.sort(roots)


def random_hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


@given(seeds, st.integers(2, 4))
def test_jacobi_matches_characteristic_polynomial(seed, d):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, d)
    evals, _ = jacobi_eigh(h)
    roots = charpoly_roots(h)
    if len(roots) == d:  # skip draws with near-degenerate pairs the grid cannot split
        assert np.allclose(evals, roots, atol=1e-9)


@given(seeds, st.integers(2, 8))
def test_jacobi_eigenpairs(seed, d):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, d)
    evals, vecs = jacobi_eigh(h)
    assert np.all(np.diff(evals) >= -1e-12)
    assert np.allclose(vecs.conj().T @ vecs, np.eye(d), atol=1e-12)
    assert np.allclose(h @ vecs, vecs * evals, atol=1e-10)
    assert np.allclose(evals, np.linalg.eigvalsh(h), atol=1e-11)


def test_jacobi_batched_and_degenerate(rng):
    stack = np.stack([random_hermitian(rng, 3) for _ in range(50)])
    evals, vecs = jacobi_eigh(stack)
    assert evals.shape == (50, 3) and vecs.shape == (50, 3, 3)
    assert np.allclose(evals, np.linalg.eigvalsh(stack), atol=1e-11)
    u = random_unitary(rng, 4)
    h = u @ np.diag([1.0, 1.0, 1.0, -2.0]) @ u.conj().T
    assert np.allclose(jacobi_eigh(h)[0], [-2, 1, 1, 1], atol=1e-12)
    assert np.allclose(max_eigenvalues(stack), np.linalg.eigvalsh(stack)[:, -1], atol=1e-11)


def test_herm_eig_max(rng):
    h = random_hermitian(rng, 5)
    lam, v = herm_eig_max(h)
    assert lam == pytest.approx(np.linalg.eigvalsh(h)[-1], abs=1e-11)
    assert np.linalg.norm(v) == pytest.approx(1.0)
    assert np.allclose(h @ v, lam * v, atol=1e-10)


def test_validators_reject_bad_operators():
    with pytest.raises(InputError):
        check_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(InputError):
        check_density(np.diag([1.5, -0.5]))
    with pytest.raises(InputError):
        check_density(np.diag([0.7, 0.7]))
    with pytest.raises(InputError):
        check_unitary(np.array([[1, 1], [0, 1]]))
    with pytest.raises(InputError):
        check_hermitian(np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(InputError):
        check_bloch([0.0, 0.0, 1.1])
    with pytest.raises(InputError):
        check_bloch([0.0, 0.6, 0.0], unit=True)


def test_bipartite_state_is_read_only(rng):
    w = BipartiteState(random_density(rng, 4), (2, 2))
    with pytest.raises(ValueError):
        w.matrix[0, 0] = 0
    with pytest.raises(InputError):
        BipartiteState(random_density(rng, 4), (2, 3))


def test_partial_traces_of_products(rng):
    ra, rb = random_density(rng, 2), random_density(rng, 3)
    w = BipartiteState(np.kron(ra, rb), (2, 3))
    assert np.allclose(partial_trace_A(w), rb, atol=1e-14)
    assert np.allclose(partial_trace_B(w), ra, atol=1e-14)


def test_partial_trace_against_explicit_sum(rng):
    da, db = 3, 2
    m = random_density(rng, da * db)
    w = BipartiteState(m, (da, db))
    expect_b = sum(m[i * db:(i + 1) * db, i * db:(i + 1) * db] for i in range(da))
    assert np.allclose(partial_trace_A(w), expect_b, atol=1e-14)


def test_partial_transpose_of_werner():
    for eta in (0.2, 1 / 3, 0.7):
        low = jacobi_eigh(partial_transpose_B(isotropic_state(2, eta)))[0][0]
        assert low == pytest.approx((1 - 3 * eta) / 4, abs=1e-12)


def test_mixture_is_convex(rng):
    a = BipartiteState(random_density(rng, 4), (2, 2))
    b = BipartiteState(random_density(rng, 4), (2, 2))
    m = mixture([a, b], [0.25, 0.75])
    assert np.allclose(m.matrix, 0.25 * a.matrix + 0.75 * b.matrix)


def test_bloch_round_trip(rng):
    r = random_unit(rng, 1000) * rng.uniform(0, 1, size=(1000, 1)) ** (1 / 3)
    for v in r:
        rho = bloch_to_density(v)
        assert np.allclose(density_to_bloch(rho), v, atol=1e-13)
        assert np.trace(rho).real == pytest.approx(1.0)
        assert np.min(np.linalg.eigvalsh(rho)) >= -1e-13


def test_pauli_algebra(rng):
    n, m = random_unit(rng), random_unit(rng)
    prod = pauli_dot(n) @ pauli_dot(m)
    expect = np.dot(n, m) * np.eye(2) + 1j * pauli_dot(np.cross(n, m))
    assert np.allclose(prod, expect, atol=1e-14)


def test_correlation_tensor_of_phi_plus():
    t = correlation_tensor(isotropic_state(2, 1.0))
    assert np.allclose(t, np.diag([1.0, -1.0, 1.0]), atol=1e-14)


def test_expectation_matches_trace(rng):
    w = BipartiteState(random_density(rng, 4), (2, 2))
    for i in range(3):
        for j in range(3):
            direct = np.trace(w.matrix @ np.kron(PAULI[i], PAULI[j])).real
            assert expectation(w, PAULI[i], PAULI[j]) == pytest.approx(direct, abs=1e-14)


def test_jacobi_subnormal_off_diagonal():
    h = np.array([[0.3, 3e-310 * (1 + 1j)], [3e-310 * (1 - 1j), 0.7]])
    with np.errstate(over="raise", invalid="raise", divide="raise"):
        evals, vecs = jacobi_eigh(np.stack([h, h[::-1, ::-1]]))
    assert np.allclose(evals, [[0.3, 0.7], [0.3, 0.7]])
    assert np.all(np.isfinite(vecs))
