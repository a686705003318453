import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import random_unit, random_unitary
from steerkit.errors import BudgetExceeded, InputError, QuadratureError
from steerkit.measurements import (
    ProjectiveMeasurement,
    basis_from_unitary,
    four_vector_candidate,
    mub_pair_assembly,
    planar_family,
    qubit_assembly,
    uniform,
)
from steerkit.sphere import circle_rule, sphere_rule
from steerkit.thresholds import (
    DirectionDensity,
    continuous_nst,
    continuous_threshold,
    fidelity_from_geometric,
    general_nst,
    geometric_from_fidelity,
    planar_nst,
    planar_nst_closed_form,
    probabilistic_oracle,
    qubit_nst,
    two_setting_nst_from_unitary,
)

seeds = st.integers(0, 2**32 - 1)


def brute_force_f(assembly):
    """Plain loop over deterministic responses with numpy's eigensolver."""
    proj = assembly.projector_stack()
    best = -np.inf
    for resp in itertools.product(range(assembly.dim), repeat=assembly.n_settings):
        rho = sum(q * proj[mu, a] for mu, (q, a) in enumerate(zip(assembly.weights, resp)))
        best = max(best, np.linalg.eigvalsh(rho)[-1])
    return best


def random_weights(rng, n):
    return rng.dirichlet(np.ones(n))


@given(seeds, st.integers(2, 6))
def test_qubit_and_general_agree(seed, n):
    rng = np.random.default_rng(seed)
    a = qubit_assembly(random_unit(rng, n), random_weights(rng, n))
    q, g = qubit_nst(a), general_nst(a)
    assert q.f_nst == pytest.approx(g.f_nst, abs=1e-12)
    assert q.g_nst == pytest.approx(g.g_nst, abs=1e-12)
    assert q.g_nst == pytest.approx(geometric_from_fidelity(q.f_nst, 2), abs=1e-14)


@given(seeds, st.sampled_from([(2, 3), (3, 2), (3, 3), (4, 2)]))
def test_general_matches_brute_force(seed, shape):
    d, n = shape
    rng = np.random.default_rng(seed)
    a = uniform([basis_from_unitary(random_unitary(rng, d)) for _ in range(n)]).with_weights(random_weights(rng, n))
    rep = general_nst(a)
    assert rep.f_nst == pytest.approx(brute_force_f(a), abs=1e-11)
    assert 1.0 / d - 1e-12 <= rep.f_nst <= 1.0 + 1e-12
    # the reported maximizer reproduces the value
    lam = np.linalg.eigvalsh(rep.rho_bar)[-1]
    assert lam == pytest.approx(rep.f_nst, abs=1e-11)


@given(seeds, st.integers(2, 5))
def test_qubit_nst_rotation_invariant(seed, n):
    rng = np.random.default_rng(seed)
    axes = random_unit(rng, n)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    w = random_weights(rng, n)
    g1 = qubit_nst(qubit_assembly(axes, w)).g_nst
    g2 = qubit_nst(qubit_assembly(axes @ q.T, w)).g_nst
    assert g1 == pytest.approx(g2, abs=1e-12)


@given(seeds)
def test_general_nst_unitary_invariant(seed):
    rng = np.random.default_rng(seed)
    a = uniform([basis_from_unitary(random_unitary(rng, 3)) for _ in range(2)])
    v = random_unitary(rng, 3)
    rotated = uniform(
        [ProjectiveMeasurement(np.einsum("ij,ajk,lk->ail", v, m.projectors, v.conj())) for m in a.measurements]
    )
    assert general_nst(a).f_nst == pytest.approx(general_nst(rotated).f_nst, abs=1e-11)


def test_setting_order_and_duplicates():
    axes = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], float)
    g = qubit_nst(qubit_assembly(axes)).g_nst
    assert qubit_nst(qubit_assembly(axes[::-1])).g_nst == pytest.approx(g, abs=1e-14)
    # a repeated axis behaves like one setting with the combined weight
    dup = qubit_nst(qubit_assembly([[0, 0, 1], [0, 0, 1], [1, 0, 0]], [0.25, 0.25, 0.5])).g_nst
    assert dup == pytest.approx(np.sqrt(0.5), abs=1e-14)
    assert qubit_nst(qubit_assembly([[0, 0, 1]])).g_nst == pytest.approx(1.0)


def test_maximizer_is_lexicographically_smallest():
    rep = qubit_nst(qubit_assembly([[0, 0, 1], [1, 0, 0]]))
    assert rep.maximizer.assignments == (0, 0)
    assert rep.to_json()["maximizer"] == [1, 1]
    # antipodal axes: sign pattern (+, -)
    rep = qubit_nst(qubit_assembly([[0, 0, 1], [0, 0, -1]]))
    assert rep.maximizer.signs() == [1, -1]


def test_thread_count_does_not_change_result(monkeypatch, rng):
    a = qubit_assembly(random_unit(rng, 16))
    monkeypatch.setenv("STEERKIT_THREADS", "1")
    r1 = qubit_nst(a)
    monkeypatch.setenv("STEERKIT_THREADS", "4")
    r4 = qubit_nst(a)
    assert r1.g_nst == r4.g_nst and r1.maximizer == r4.maximizer


def test_budgets():
    with pytest.raises(BudgetExceeded):
        qubit_nst(planar_family(30))
    with pytest.raises(BudgetExceeded):
        general_nst(mub_pair_assembly(4), budget=10)
    with pytest.raises(InputError):
        qubit_nst(mub_pair_assembly(3))


def test_geometric_map():
    assert geometric_from_fidelity(1.0, 3) == pytest.approx(1.0)
    assert geometric_from_fidelity(1 / 3, 3) == pytest.approx(0.0)
    for d in (2, 5):
        assert fidelity_from_geometric(geometric_from_fidelity(0.8, d), d) == pytest.approx(0.8)
    with pytest.raises(InputError):
        geometric_from_fidelity(0.1, 2)


def planar_oracle(n, grid=200_001):
    """Dense scan over the in-plane direction of the signed sum."""
    ang = np.arange(n) * np.pi / n
    alpha = np.linspace(0, np.pi, grid)
    return np.max(np.abs(np.cos(ang[None, :] - alpha[:, None])).sum(axis=1)) / n


@pytest.mark.parametrize("n", range(2, 13))
def test_planar_closed_form_and_oracle(n):
    assert planar_nst(n) == pytest.approx(planar_nst_closed_form(n), abs=1e-12)
    assert planar_nst(n) == pytest.approx(planar_oracle(n), abs=1e-9)


def test_planar_decreases_to_circle_limit():
    vals = [planar_nst(n) for n in range(2, 20)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 2 / np.pi


@pytest.mark.parametrize("d", range(2, 8))
def test_mub_pair_against_fourier_sum(d):
    """Independent value: largest eigenvalue of (|a><a| + F|b><b|F^+)/2 over (a, b)."""
    k = np.arange(d)
    best = 0.0
    for b in range(d):
        fb = np.exp(2j * np.pi * b * k / d) / np.sqrt(d)
        rho = 0.5 * (np.diag(np.eye(d)[0]) + np.outer(fb, fb.conj()))
        best = max(best, np.linalg.eigvalsh(rho)[-1])
    assert general_nst(mub_pair_assembly(d)).f_nst == pytest.approx(best, abs=1e-12)
    assert two_setting_nst_from_unitary(
        np.exp(2j * np.pi * np.outer(k, k) / d) / np.sqrt(d)
    ) == pytest.approx(best, abs=1e-12)


def test_four_vector_value():
    assert qubit_nst(four_vector_candidate()).g_nst == pytest.approx(np.sqrt(5) / 4, abs=1e-12)


def test_quadrature_rules_integrate_polynomials():
    pts, wts = sphere_rule(16, 32)
    assert wts.sum() == pytest.approx(1.0)
    assert wts @ pts[:, 2] ** 2 == pytest.approx(1 / 3, abs=1e-13)
    assert wts @ (pts[:, 0] ** 2 * pts[:, 1] ** 2) == pytest.approx(1 / 15, abs=1e-13)
    pts, wts = circle_rule(64)
    assert wts @ pts[:, 0] ** 4 == pytest.approx(3 / 8, abs=1e-13)


def test_continuous_uniform_densities():
    circ = continuous_threshold(DirectionDensity.uniform_circle())
    assert circ.g_nst == pytest.approx(2 / np.pi, abs=1e-4)
    assert circ.error_estimate < 1e-4
    assert abs(circ.direction[2]) < 1e-6
    assert continuous_nst(DirectionDensity.uniform_sphere()) == pytest.approx(0.5, abs=1e-4)


def test_discrete_density_matches_qubit_nst(rng):
    axes = random_unit(rng, 4)
    w = random_weights(rng, 4)
    g = continuous_nst(DirectionDensity.discrete(axes, w))
    assert g == pytest.approx(qubit_nst(qubit_assembly(axes, w)).g_nst, abs=1e-6)


def test_weighted_density_single_axis():
    t = np.diag([0.0, 0.0, 1.0])
    assert continuous_nst(DirectionDensity.weighted_by(t)) == pytest.approx(2 / 3, abs=1e-4)


def test_density_validation():
    with pytest.raises(InputError):
        DirectionDensity.weighted_by(np.zeros((3, 3)))
    with pytest.raises(QuadratureError):
        continuous_threshold(DirectionDensity.uniform_sphere(8), tol=1e-12)


@given(seeds, st.sampled_from([(2, 2), (2, 3), (3, 2)]))
def test_random_responses_never_beat_deterministic(seed, shape):
    d, n = shape
    rng = np.random.default_rng(seed)
    a = uniform([basis_from_unitary(random_unitary(rng, d)) for _ in range(n)])
    oracle = probabilistic_oracle(a, 500, seed=seed)
    assert oracle <= general_nst(a).f_nst + 1e-9
    assert probabilistic_oracle(a, 500, seed=seed) == oracle
    assert probabilistic_oracle(a, 10, seed=seed, include_extremes=True) == pytest.approx(general_nst(a).f_nst)
