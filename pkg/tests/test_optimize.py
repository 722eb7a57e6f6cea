import numpy as np
import pytest

from spectral_potential_lab import (
    InfeasibleError,
    IntervalGrid,
    PolarGrid,
    RadialGrid,
    annulus_competitor,
    ball_radius,
    dichotomy_diagnostic,
    integrate,
    l1_distance,
    minimize_delta_2d,
    minimize_delta_radial,
    minimize_global,
    optimal_potential,
    principal_eigenpair,
)


def test_ball_radius_conventions():
    assert ball_radius(RadialGrid(1.0, 64), 0.25) == pytest.approx(0.5)
    assert ball_radius(IntervalGrid(-1.0, 1.0, 64), 0.6) == pytest.approx(0.6)


def test_annulus_mass_and_distance(radial_grid):
    v0, delta = 0.25, 0.05
    comp = annulus_competitor(radial_grid, v0, delta)
    V_star = optimal_potential(radial_grid, v0)
    assert comp.field.mass == pytest.approx(V_star.mass, abs=1e-10)
    assert l1_distance(comp.field, V_star) == pytest.approx(delta, abs=1e-10)
    # both shells carry delta/2
    area_in = np.pi * (comp.r_star**2 - (comp.r_star - comp.r_delta) ** 2)
    assert area_in == pytest.approx(delta / 2.0, rel=1e-12)


def test_annulus_interval_widths():
    comp = annulus_competitor(IntervalGrid(-1.0, 1.0, 512), 0.6, 0.2)
    assert comp.r_delta == pytest.approx(0.05)
    assert comp.r_delta_prime == pytest.approx(0.05)


def test_annulus_infeasible_delta(radial_grid):
    with pytest.raises(InfeasibleError):
        annulus_competitor(radial_grid, 0.25, 10.0)


def test_global_minimizer_is_ball(radial_grid):
    rep = minimize_global(radial_grid, 0.25)
    V_star = optimal_potential(radial_grid, 0.25)
    assert rep.converged
    assert l1_distance(rep.V, V_star) <= 4 * np.median(radial_grid.weights)
    assert rep.lam <= principal_eigenpair(radial_grid, V_star).lam + 1e-9


def test_delta_constrained_finds_annulus(radial_grid):
    delta = 0.05
    rep = minimize_delta_radial(radial_grid, 0.25, delta)
    comp = annulus_competitor(radial_grid, 0.25, delta)
    assert l1_distance(rep.V, comp.field) <= 6 * np.median(radial_grid.weights)
    assert rep.mu_delta > rep.zeta_delta > rep.eta_delta
    assert l1_distance(rep.V, optimal_potential(radial_grid, 0.25)) == pytest.approx(
        delta, abs=1e-9)


def test_delta_constrained_2d_feasibility():
    g = PolarGrid(1.0, 48, 48)
    rep = minimize_delta_2d(g, 0.25, 0.05)
    V_star = optimal_potential(g, 0.25)
    assert l1_distance(rep.V, V_star) == pytest.approx(0.05, abs=1e-9)
    assert rep.lam >= principal_eigenpair(g, V_star).lam - 1e-8


def test_dichotomy_diagnostic_bounds(radial_grid):
    rep = minimize_delta_radial(radial_grid, 0.25, 0.05)
    f = dichotomy_diagnostic(rep)
    assert -1e-12 <= f <= 0.025 + 4 * np.median(radial_grid.weights)
    assert rep.f_delta == pytest.approx(f)


def test_optimal_potential_mass(radial_grid):
    V_star = optimal_potential(radial_grid, 0.25)
    assert V_star.mass == pytest.approx(0.25 * radial_grid.measure, rel=1e-3)
    # bang-bang up to one fractional boundary cell
    assert np.count_nonzero((V_star.values > 1e-12) & (V_star.values < 1 - 1e-12)) <= 1
    assert integrate(radial_grid, (V_star.values > 0) * 1.0) >= V_star.mass
