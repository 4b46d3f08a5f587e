import numpy as np
import pytest

from prepotential import (
    ConvergenceError,
    GridSpec,
    PreconditionError,
    ValidationError,
    converge_spectrum,
    default_grid,
    make_system,
    solve_spectrum,
)


def soliton_levels(g, hbar, k):
    n = np.arange(k)
    return g * n * hbar - n**2 * hbar**2 / 2


def richardson(coarse, fine):
    r = (coarse.grid.spacing / fine.grid.spacing) ** 2
    return (r * fine.energies - coarse.energies) / (r - 1)


def test_grid_spec_validation():
    with pytest.raises(ValidationError):
        GridSpec(half_width=5.0, points=90, levels=6)
    with pytest.raises(ValidationError):
        GridSpec(half_width=0.0, points=1000, levels=6)
    g = GridSpec(half_width=5.0, points=96, levels=6)
    assert g.refined().points == 193
    assert g.refined().spacing == pytest.approx(g.spacing / 2)


def test_harmonic_raw_grid_follows_second_order_error(harmonic):
    grid = GridSpec(half_width=10.0, points=2000, levels=6)
    t = solve_spectrum(harmonic, 1.0, grid)
    n = np.arange(6)
    h = grid.spacing
    # first-order perturbation by the stencil error -(h^2/24) p^4 / hbar^2
    p4 = 0.75 * (2 * n**2 + 2 * n + 1)
    predicted = -(h**2) / 24 * p4
    np.testing.assert_allclose(t.energies - n, predicted, rtol=0.01, atol=1e-9)


def test_harmonic_example_grid_after_one_extrapolation(harmonic):
    grid = GridSpec(half_width=10.0, points=2000, levels=6)
    coarse = solve_spectrum(harmonic, 1.0, grid)
    fine = solve_spectrum(harmonic, 1.0, grid.refined())
    np.testing.assert_allclose(richardson(coarse, fine), np.arange(6), atol=1e-6)


def test_soliton_example_grid(soliton):
    grid = GridSpec(half_width=40.0, points=4000, levels=4)
    t = solve_spectrum(soliton, 0.2, grid)
    exact = soliton_levels(1.0, 0.2, 4)
    np.testing.assert_allclose(exact[1:], [0.18, 0.32, 0.42])
    assert np.max(np.abs(t.energies - exact)) < 1e-4
    fine = solve_spectrum(soliton, 0.2, grid.refined())
    np.testing.assert_allclose(richardson(t, fine), exact, atol=1e-5)


def test_ground_state_near_zero_single_level(soliton, harmonic):
    for s in (soliton, harmonic):
        t = solve_spectrum(s, 0.5, GridSpec(half_width=15.0, points=3000, levels=1))
        assert abs(t.energies[0]) < 1e-4


def test_refinement_reduces_error_fourfold(harmonic):
    grid = GridSpec(half_width=10.0, points=499, levels=4)
    errors = []
    for _ in range(3):
        t = solve_spectrum(harmonic, 1.0, grid)
        errors.append(np.abs(t.energies[1:] - np.arange(1, 4)))
        grid = grid.refined()
    for a, b in zip(errors, errors[1:]):
        ratio = a / b
        assert np.all((ratio > 3.8) & (ratio < 4.2))


def test_converge_examples(harmonic, soliton):
    t = converge_spectrum(harmonic, 1.0, default_grid(harmonic, 1.0, 4))
    assert t.energies[1] == pytest.approx(1.0, abs=1e-8)
    assert t.extrapolated
    t = converge_spectrum(soliton, 0.5, default_grid(soliton, 0.5, 2))
    assert t.energies[1] == pytest.approx(0.375, abs=1e-8)


@pytest.mark.parametrize("name,params", [("harmonic", {"omega": 1.0}), ("poschl_teller", {"g": 1.0})])
@pytest.mark.parametrize("hbar", [0.05, 0.2, 0.5, 1.0])
def test_ground_state_energy_vanishes_under_refinement(name, params, hbar):
    s = make_system(name, params)
    t = converge_spectrum(s, hbar, default_grid(s, hbar, 1))
    assert abs(t.energies[0]) < 1e-8 * max(1.0, hbar)


@pytest.mark.parametrize("name,params", [("harmonic", {"omega": 1.0}), ("poschl_teller", {"g": 1.0})])
@pytest.mark.parametrize("hbar", [0.2, 1.0])
def test_ground_state_is_exp_w_over_hbar(name, params, hbar):
    s = make_system(name, params)
    t = converge_spectrum(s, hbar, default_grid(s, hbar, 1))
    assert t.ground_state_overlap > 1 - 1e-6


@pytest.mark.filterwarnings("ignore::prepotential.errors.ConvergenceWarning")
@pytest.mark.parametrize("hbar,bound", [(0.2, 5), (0.3, 4), (0.45, 3), (1.0, 1), (1.5, 1)])
def test_soliton_bound_state_count(soliton, hbar, bound):
    # levels n with g/hbar - n > 0
    assert sum(1 for n in range(20) if 1.0 / hbar - n > 0) == bound
    t = solve_spectrum(soliton, hbar, GridSpec(half_width=40.0, points=4000, levels=6))
    assert t.flags == tuple(["ok"] * bound + ["continuum"] * (6 - bound))
    for n in range(bound):
        assert t.energies[n] < 0.5


def test_harmonic_spectrum_linear_in_hbar(harmonic):
    scaled = []
    for hbar in (0.25, 0.5, 1.0):
        t = converge_spectrum(harmonic, hbar, default_grid(harmonic, hbar, 6))
        scaled.append(t.energies / hbar)
    for row in scaled[1:]:
        np.testing.assert_allclose(row, scaled[0], atol=1e-6)


def test_soliton_converged_against_closed_form(soliton):
    for hbar in (0.05, 0.1, 0.2):
        t = converge_spectrum(soliton, hbar, default_grid(soliton, hbar, 4))
        np.testing.assert_allclose(t.energies, soliton_levels(1.0, hbar, 4), atol=1e-8)


def test_box_grows_for_slowly_decaying_states(soliton):
    base = default_grid(soliton, 0.2, 4)
    t = converge_spectrum(soliton, 0.2, base)
    assert t.grid.half_width > base.half_width
    assert np.max(t.boundary_amplitude[: 4]) <= 1e-10


def test_multidimensional_rejected(calogero3):
    with pytest.raises(PreconditionError):
        solve_spectrum(calogero3, 0.1, GridSpec(half_width=5.0, points=200, levels=2))


def test_nonconvergence_raises_with_diagnostics(harmonic):
    with pytest.raises(ConvergenceError) as info:
        converge_spectrum(harmonic, 1.0, GridSpec(half_width=10.0, points=127, levels=4), max_doublings=1)
    assert isinstance(info.value.diagnostics, list)


def test_truncated_box_warns(harmonic):
    from prepotential.errors import ConvergenceWarning

    with pytest.warns(ConvergenceWarning):
        solve_spectrum(harmonic, 1.0, GridSpec(half_width=3.0, points=400, levels=2))


def test_serialization(soliton):
    t = solve_spectrum(soliton, 0.2, GridSpec(half_width=20.0, points=2000, levels=6))
    rows = t.csv_rows()
    assert rows[0][:2] == (0.2, 0)
    assert rows[-1][3] == "continuum"
    d = t.as_dict()
    assert d["flags"][-1] == "continuum" and len(d["energies"]) == 6
