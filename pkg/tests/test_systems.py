import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prepotential import (
    CatalogError,
    DomainError,
    ValidationError,
    classical_potential,
    custom_system,
    make_system,
    quantum_potential,
)

CATALOG = [
    ("harmonic", {"omega": 1.3}),
    ("poschl_teller", {"g": 0.7}),
    ("calogero_a", {"N": 3, "omega": 1.0, "g": 1.0}),
    ("calogero_a", {"N": 5, "omega": 0.5, "g": 2.0}),
]


def interior_points(system, rng, n=100):
    if system.name == "calogero_a":
        r = system.dimension
        pts = np.sort(rng.uniform(-3, 3, size=(n, r)), axis=1)
        # keep particles apart so the log terms stay well conditioned
        pts += np.arange(r) * 0.3
        return pts
    return rng.uniform(-3, 3, size=(n, 1))


def fd_grad(f, q, h=1e-6):
    g = np.empty_like(q)
    for j in range(q.size):
        e = np.zeros_like(q)
        e[j] = h
        g[j] = (f(q + e) - f(q - e)) / (2 * h)
    return g


def test_harmonic_prepotential_matches_closed_form():
    s = make_system("harmonic", omega=1.0)
    for q in (-2.0, 0.0, 0.5, 3.0):
        assert s.W(np.array([q])) == pytest.approx(-(q**2) / 2)


def test_soliton_prepotential_matches_closed_form():
    s = make_system("poschl_teller", g=1.0)
    for q in (-2.0, 0.0, 0.5, 3.0, 40.0):
        assert s.W(np.array([q])) == pytest.approx(-math.log(math.cosh(q)), rel=1e-14)


def test_calogero_prepotential_direct_evaluation():
    s = make_system("calogero_a", {"N": 3, "omega": 1, "g": 1})
    assert s.dimension == 3
    q = [1.0, 2.0, 3.0]
    expected = -0.5 * sum(x * x for x in q)
    for j in range(3):
        for k in range(j + 1, 3):
            expected += math.log(abs(q[j] - q[k]))
    assert expected == pytest.approx(-7 + math.log(2))
    assert s.W(np.array(q)) == pytest.approx(expected, abs=1e-14)
    assert s.W(np.array(q)) == pytest.approx(-6.3069, abs=1e-4)


def test_catalog_errors():
    with pytest.raises(CatalogError):
        make_system("hydrogen", Z=1)
    with pytest.raises(ValidationError):
        make_system("harmonic", omega=0.0)
    with pytest.raises(ValidationError):
        make_system("poschl_teller", g=-1)
    with pytest.raises(ValidationError):
        make_system("calogero_a", N=1, omega=1, g=1)
    with pytest.raises(ValidationError):
        make_system("calogero_a", N=2.5, omega=1, g=1)
    with pytest.raises(ValidationError):
        make_system("harmonic")
    with pytest.raises(ValidationError):
        make_system("harmonic", omega=1, g=2)


def test_hbar_dependent_prepotentials_rejected():
    with pytest.raises(ValidationError):
        make_system("harmonic", omega=1, hbar=0.1)
    with pytest.raises(ValidationError):
        custom_system(lambda q, hbar: -q @ q / 2, 1)


def test_classical_potential_examples(harmonic, soliton):
    assert classical_potential(harmonic, 2.0) == pytest.approx(2.0)
    assert classical_potential(soliton, math.log(1 + math.sqrt(2))) == pytest.approx(0.25, abs=1e-15)
    assert classical_potential(harmonic, 0.0) == 0.0
    assert classical_potential(soliton, 0.0) == 0.0


def test_classical_potential_soliton_closed_form(soliton, rng):
    q = rng.uniform(-4, 4, 50)
    expected = -1 / (2 * np.cosh(q) ** 2) + 0.5
    np.testing.assert_allclose(classical_potential(soliton, q), expected, rtol=1e-13, atol=1e-15)


def test_quantum_potential_examples(harmonic, soliton):
    assert quantum_potential(harmonic, 0.0, 1.0) == pytest.approx(-0.5)
    assert quantum_potential(soliton, 0.0, 0.5) == pytest.approx(-0.25)


@pytest.mark.parametrize("hbar", [0.05, 0.2, 1.0])
def test_quantum_potential_soliton_closed_form(soliton, rng, hbar):
    g = 1.0
    q = rng.uniform(-4, 4, 50)
    expected = -g * (g + hbar) / (2 * np.cosh(q) ** 2) + g**2 / 2
    np.testing.assert_allclose(quantum_potential(soliton, q, hbar), expected, rtol=1e-12, atol=1e-15)


def test_quantum_potential_harmonic_closed_form(rng):
    omega = 1.7
    s = make_system("harmonic", omega=omega)
    q = rng.uniform(-4, 4, 20)
    np.testing.assert_allclose(quantum_potential(s, q, 0.3), omega**2 * q**2 / 2 - omega * 0.3 / 2)


def test_quantum_potential_rejects_bad_hbar(harmonic):
    with pytest.raises(ValidationError):
        quantum_potential(harmonic, 0.0, 0.0)


@settings(max_examples=50, deadline=None)
@given(
    q=st.floats(-5, 5),
    hbar=st.floats(1e-4, 2.0),
)
def test_quantum_minus_classical_is_linear_in_hbar(q, hbar):
    s = make_system("poschl_teller", g=1.0)
    slope = 0.5 * float(np.trace(s.hessW(np.array([q]))))
    diff = quantum_potential(s, q, hbar) - classical_potential(s, q)
    assert diff == pytest.approx(slope * hbar, rel=1e-9, abs=1e-15)


@pytest.mark.parametrize("name,params", CATALOG)
def test_gradient_matches_central_differences(name, params, rng):
    s = make_system(name, params)
    for q in interior_points(s, rng):
        g = s.gradW(q)
        g_fd = fd_grad(lambda x: float(s.W(x)), q)
        assert np.linalg.norm(g - g_fd) <= 1e-6 * max(1.0, np.linalg.norm(g))


@pytest.mark.parametrize("name,params", CATALOG)
def test_hessian_symmetric_and_matches_gradient_differences(name, params, rng):
    s = make_system(name, params)
    for q in interior_points(s, rng, 30):
        H = s.hessW(q)
        assert np.max(np.abs(H - H.T)) < 1e-12
        J = np.column_stack([fd_grad(lambda x: s.gradW(x)[i], q) for i in range(q.size)]).T
        assert np.max(np.abs(H - J)) <= 1e-5 * max(1.0, np.max(np.abs(H)))


def test_batch_evaluation_matches_pointwise(rng):
    s = make_system("calogero_a", N=4, omega=1, g=2)
    pts = interior_points(s, rng, 10)
    W = s.W(pts)
    G = s.gradW(pts)
    H = s.hessW(pts)
    for i, q in enumerate(pts):
        assert W[i] == pytest.approx(s.W(q))
        np.testing.assert_allclose(G[i], s.gradW(q))
        np.testing.assert_allclose(H[i], s.hessW(q))


def test_calogero_wall_divergence():
    s = make_system("calogero_a", N=3, omega=1, g=1)
    values = [float(s.W(np.array([-1.0, 0.0, eps]))) for eps in (1e-2, 1e-4, 1e-6)]
    assert values[0] > values[1] > values[2]
    assert values[2] < float(s.W(np.array([-1.0, 0.0, 1.0]))) - 10


def test_calogero_domain_is_an_error():
    s = make_system("calogero_a", N=3, omega=1, g=1)
    with pytest.raises(DomainError):
        classical_potential(s, [0.0, 0.0, 1.0])
    with pytest.raises(DomainError):
        quantum_potential(s, [1.0, 0.0, 2.0], 0.1)
    assert classical_potential(s, [-1.0, 0.0, 1.0]) >= 0


def test_custom_system_difference_fallbacks(rng):
    s = custom_system(lambda q: -0.5 * q @ q - 0.1 * q[0] ** 4, 2)
    assert not s.analytic_gradient and not s.analytic_hessian
    for q in rng.uniform(-1, 1, size=(10, 2)):
        exact = -q - np.array([0.4 * q[0] ** 3, 0.0])
        np.testing.assert_allclose(s.gradW(q), exact, rtol=1e-6, atol=1e-9)
        H = np.diag([-1 - 1.2 * q[0] ** 2, -1.0])
        np.testing.assert_allclose(s.hessW(q), H, atol=1e-5)


def test_custom_system_domain_predicate():
    s = custom_system(lambda q: math.log(q[0]) - q[0], 1, domain=lambda q: q[0] > 0)
    assert classical_potential(s, 2.0) == pytest.approx(0.5 * (0.5 - 1) ** 2, rel=1e-8)
    with pytest.raises(DomainError):
        classical_potential(s, -1.0)


@pytest.mark.parametrize("name,params", CATALOG[:2])
def test_registry_gradients_match_differences(name, params, rng):
    s = make_system(name, params)
    for f in s.reference_classical_eigenfunctions:
        for q in rng.uniform(-1.5, 1.5, size=(20, 1)):
            g_fd = fd_grad(lambda x: float(f.phi(x)), q)
            g = f.grad_phi(q)
            assert np.linalg.norm(g - g_fd) <= 1e-6 * max(1.0, np.linalg.norm(g))


def test_systems_are_immutable(harmonic):
    with pytest.raises(AttributeError):
        harmonic.dimension = 2
    with pytest.raises(TypeError):
        harmonic.params["omega"] = 2.0
