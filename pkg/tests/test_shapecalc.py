import numpy as np
import pytest

from spectral_potential_lab import (
    DomainError,
    FourierPerturbation,
    PolarGrid,
    RadialGrid,
    StateError,
    ball_context,
    fd_shape_check,
    hessian_quadratic_form,
    perturbed_ball_potential,
    solve_mode,
)


def test_ball_context_boundary_data(ball_ctx):
    assert ball_ctx.r_star == pytest.approx(0.5)
    assert ball_ctx.u_star_boundary > 0
    assert ball_ctx.du_star_boundary < 0  # Hopf lemma
    assert ball_ctx.tau == pytest.approx(-ball_ctx.u_star_boundary**2)


def test_omega_sequence_monotone_and_bounded(ball_ctx):
    grid = ball_ctx.grid
    limit = -ball_ctx.du_star_boundary
    omegas = [solve_mode(ball_ctx, grid, k).omega_k for k in range(1, 33)]
    assert omegas[0] > 0
    assert np.all(np.diff(omegas) > 0)
    assert all(w <= limit + 1e-6 for w in omegas)


def test_mode_profile_vanishes_at_ends(ball_ctx):
    # the Dirichlet node at r = R is eliminated, so the last retained value
    # is one cell inside the boundary: O(h), not exactly zero
    mode = solve_mode(ball_ctx, ball_ctx.grid, 2)
    peak = np.max(np.abs(mode.psi))
    assert abs(mode.psi[-1]) < 5e-3 * peak
    assert abs(mode.psi[0]) < 1e-2 * peak


def test_quadratic_form_additive(ball_ctx):
    grid = ball_ctx.grid
    modes = [solve_mode(ball_ctx, grid, k) for k in (1, 2)]
    g1 = FourierPerturbation(alpha=np.array([1.0, 0.0]), beta=np.zeros(2))
    g2 = FourierPerturbation(alpha=np.array([0.0, 1.0]), beta=np.zeros(2))
    g12 = FourierPerturbation(alpha=np.array([1.0, 1.0]), beta=np.zeros(2))
    q1 = hessian_quadratic_form(ball_ctx, modes, g1)
    q2 = hessian_quadratic_form(ball_ctx, modes, g2)
    q12 = hessian_quadratic_form(ball_ctx, modes, g12)
    assert q12 == pytest.approx(q1 + q2, rel=1e-12)
    assert q1 > 0 and q2 > 0


def test_quadratic_form_requires_modes(ball_ctx):
    g = FourierPerturbation(alpha=np.array([0.0, 1.0]), beta=np.zeros(2))
    with pytest.raises(StateError):
        hessian_quadratic_form(ball_ctx, [], g)


def test_perturbed_ball_mass_expansion(ball_ctx):
    grid = PolarGrid(1.0, 96, 96)
    g = FourierPerturbation(alpha=np.array([0.0, 1.0]), beta=np.zeros(2))
    m0 = perturbed_ball_potential(grid, ball_ctx, g, 1e-6).mass
    m = perturbed_ball_potential(grid, ball_ctx, g, 0.05).mass
    # area of {r <= r* + t g}: pi r*^2 + (t^2/2) int g^2 dtheta
    assert m - m0 == pytest.approx(0.05**2 / 2.0 * np.pi, rel=0.05)


def test_fd_check_criticality_and_hessian(ball_ctx):
    grid = PolarGrid(1.0, 128, 128)
    g = FourierPerturbation(alpha=np.array([0.0, 1.0]), beta=np.zeros(2))
    check = fd_shape_check(ball_ctx, grid, g, [0.04, 0.02])
    qf = hessian_quadratic_form(ball_ctx, [solve_mode(ball_ctx, ball_ctx.grid, 2)], g)
    assert abs(check.first_derivative_estimates[-1]) < 1e-6
    assert check.second_derivative_estimates[-1] == pytest.approx(qf, rel=0.1)


def test_fd_check_rejects_nonzero_mean(ball_ctx):
    grid = PolarGrid(1.0, 32, 32)

    class Lifted:
        def evaluate(self, theta):
            return 0.1 + np.cos(theta)

        def max_abs(self):
            return 1.1

    with pytest.raises(DomainError):
        fd_shape_check(ball_ctx, grid, Lifted(), [0.02])


def test_context_rejects_bad_mass():
    with pytest.raises(Exception):
        ball_context(RadialGrid(1.0, 128), 1.5)
