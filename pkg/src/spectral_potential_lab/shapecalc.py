"""Shape calculus at the optimal ball.

Provides the boundary data of the optimal eigenpair (Lagrange multiplier,
mean curvature), the per-Fourier-mode radial problems whose boundary values
build the coercivity sequence omega_k, the diagonal quadratic form of the
second derivative of the volume-penalized eigenvalue, and a finite-difference
cross-check of that form on normally perturbed balls (polar grid).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import DomainError, SolverError, StateError
from .eigensolve import PotentialField, SolveOptions, principal_eigenpair
from .grids import PolarGrid, RadialGrid, integrate
from .optimize import ball_radius, optimal_potential


@dataclass(frozen=True)
class BallContext:
    """Optimal-ball eigenpair with the boundary data used by shape calculus."""

    grid: RadialGrid
    v0: float
    r_star: float
    lambda_star: float
    u_star: np.ndarray
    u_star_boundary: float
    du_star_boundary: float
    tau: float = field(init=False)
    H_star: float = field(init=False)

    def __post_init__(self):
        if self.du_star_boundary >= 0:
            raise SolverError("radial eigenfunction must be strictly decreasing at r*")
        object.__setattr__(self, "tau", -self.u_star_boundary**2)
        object.__setattr__(self, "H_star", 1.0 / self.r_star)


@dataclass(frozen=True)
class FourierPerturbation:
    """Zero-mean boundary perturbation g = sum alpha_k cos(k.) + beta_k sin(k.)."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        b = np.atleast_1d(np.asarray(self.beta, dtype=float))
        if a.shape != b.shape or a.ndim != 1 or a.size == 0:
            raise DomainError("alpha and beta must be 1-D arrays of equal length (k = 1..K)")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def kmax(self) -> int:
        return self.alpha.size

    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        k = np.arange(1, self.kmax + 1)
        return np.cos(np.outer(theta, k)) @ self.alpha + np.sin(np.outer(theta, k)) @ self.beta

    def boundary_l2_sq(self, r_star: float) -> float:
        """||g||^2 over the circle of radius r_star."""
        return float(np.pi * r_star * np.sum(self.alpha**2 + self.beta**2))

    def max_abs(self) -> float:
        return float(np.sum(np.abs(self.alpha)) + np.sum(np.abs(self.beta)))


@dataclass(frozen=True)
class ModeSolution:
    """Radial solution psi_k of the mode-k jump problem and its omega weight."""

    k: int
    psi: np.ndarray
    psi_at_rstar: float
    omega_k: float


def _quadratic_boundary_values(grid: RadialGrid, u: np.ndarray, r_star: float):
    """One-sided quadratic interpolation of (u, u') at r_star from inside."""
    i = int(np.searchsorted(grid.nodes, r_star + 1e-15)) - 1  # last node <= r*
    i = max(i, 2)
    idx = [i - 2, i - 1, i]
    coef = np.polyfit(grid.nodes[idx], u[idx], 2)
    val = float(np.polyval(coef, r_star))
    dval = float(np.polyval(np.polyder(coef), r_star))
    return val, dval


def ball_context(grid: RadialGrid, v0: float,
                 opts: SolveOptions = SolveOptions()) -> BallContext:
    """Solve the optimal-ball eigenpair and extract its boundary data."""
    r_star = ball_radius(grid, v0)
    V_star = optimal_potential(grid, v0)
    eig = principal_eigenpair(grid, V_star, opts)
    u_b, du_b = _quadratic_boundary_values(grid, eig.u, r_star)
    return BallContext(
        grid=grid, v0=v0, r_star=r_star, lambda_star=eig.lam, u_star=eig.u,
        u_star_boundary=u_b, du_star_boundary=du_b,
    )


def solve_mode(ctx: BallContext, grid: RadialGrid, k: int) -> ModeSolution:
    """Solve the mode-k radial problem with the derivative jump at r*.

    The jump [psi'](r*) = -u*(r*) is imposed weakly as a point load of
    magnitude r* u*(r*) spread over the bracketing nodes (hat weights); this
    keeps a single symmetric tridiagonal solve.  psi is pinned to 0 at r = 0
    (consistent with the r^k behavior for k >= 1) and at r = R.
    """
    if k < 1:
        raise DomainError(f"mode index must be >= 1, got {k}")
    r, h = grid.nodes, grid.h
    v_star = optimal_potential(grid, ctx.v0).values
    r_up, r_dn = r + h / 2.0, r - h / 2.0
    diag = (r_up + r_dn) / h + r * h * (k**2 / r**2 - ctx.lambda_star - v_star)
    off = -r_up[:-1] / h
    rhs = np.zeros(grid.n)
    j = int(np.clip(np.searchsorted(r, ctx.r_star) - 1, 0, grid.n - 2))
    w_hi = (ctx.r_star - r[j]) / h
    load = ctx.r_star * ctx.u_star_boundary
    rhs[j] = load * (1.0 - w_hi)
    rhs[j + 1] = load * w_hi
    ab = np.zeros((2, grid.n))
    ab[0, 1:] = off
    ab[1, :] = diag
    try:
        psi = sla.solveh_banded(ab, rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise SolverError(f"mode-{k} system is singular (resonant eigenvalue?)") from exc
    psi_star = float(psi[j] * (1.0 - w_hi) + psi[j + 1] * w_hi)
    omega = -ctx.du_star_boundary - psi_star
    return ModeSolution(k=k, psi=psi, psi_at_rstar=psi_star, omega_k=omega)


def hessian_quadratic_form(ctx: BallContext, modes: list[ModeSolution],
                           g: FourierPerturbation) -> float:
    """Second derivative of the volume-penalized eigenvalue along g.

    Equals 2*pi*r* * u*(r*) * sum_k omega_k (alpha_k^2 + beta_k^2); the
    leading factor is the boundary-circle measure coming from integrating
    the squared mode profiles over the circle of radius r*.  Cross-validated
    against central finite differences by fd_shape_check.
    """
    by_k = {m.k: m for m in modes}
    total = 0.0
    for k in range(1, g.kmax + 1):
        c = g.alpha[k - 1] ** 2 + g.beta[k - 1] ** 2
        if c == 0.0:
            continue
        if k not in by_k:
            raise StateError(f"missing mode solution for k={k}")
        total += by_k[k].omega_k * c
    return 2.0 * np.pi * ctx.r_star * ctx.u_star_boundary * total


def perturbed_ball_potential(grid: PolarGrid, ctx: BallContext, g: FourierPerturbation,
                             t: float, subslices: int = 4) -> PotentialField:
    """Area-fraction-sampled indicator of {(r, theta): r <= r* + t g(theta)}.

    Each cell receives the fraction of its area inside the region, computed
    by radial sub-slicing of every angular column; the resulting eigenvalue
    depends smoothly on t, as needed by finite-difference derivative checks.
    """
    gmax = g.max_abs()
    if abs(t) * gmax >= min(ctx.r_star, grid.R - ctx.r_star):
        raise DomainError(f"|t|*max|g| = {abs(t) * gmax} too large for r* = {ctx.r_star}")
    offsets = grid.dtheta * ((np.arange(subslices) + 0.5) / subslices - 0.5)
    theta_sub = (grid.theta[:, None] + offsets[None, :]).ravel()
    rho = ctx.r_star + t * g.evaluate(theta_sub)  # (ntheta*subslices,)
    r_lo = (grid.r - grid.dr / 2.0)[:, None]
    r_hi = (grid.r + grid.dr / 2.0)[:, None]
    frac = np.clip(
        (np.minimum(rho[None, :] ** 2, r_hi**2) - r_lo**2) / (r_hi**2 - r_lo**2), 0.0, 1.0
    )
    frac = frac.reshape(grid.nr, grid.ntheta, subslices).mean(axis=2)
    return PotentialField(grid, frac.reshape(-1))


@dataclass(frozen=True)
class ShapeDerivativeCheck:
    ts: tuple[float, ...]
    L_values: dict[float, float]
    first_derivative_estimates: tuple[float, ...]
    second_derivative_estimates: tuple[float, ...]
    noisy: bool


def fd_shape_check(ctx: BallContext, polar_grid: PolarGrid, g: FourierPerturbation,
                   ts: list[float], opts: SolveOptions = SolveOptions(),
                   subslices: int = 4) -> ShapeDerivativeCheck:
    """Central finite differences of L(t) = lambda(B_{t,g}) - tau * mass(B_{t,g}).

    The first derivative should vanish as t -> 0 (the ball is critical) and
    the second should approach the Fourier quadratic form.
    """
    mean = abs(float(np.mean(g.evaluate(np.linspace(0, 2 * np.pi, 4096, endpoint=False)))))
    if mean > 1e-10:
        raise DomainError("perturbation g must have zero mean on the boundary circle")
    if any(t2 >= t1 for t1, t2 in zip(ts, ts[1:])):
        raise DomainError("step sizes ts must be strictly decreasing")

    def L(t: float) -> float:
        Vf = perturbed_ball_potential(polar_grid, ctx, g, t, subslices=subslices)
        lam = principal_eigenpair(polar_grid, Vf, opts).lam
        return lam - ctx.tau * Vf.mass

    L_values = {0.0: L(0.0)}
    fd1, fd2 = [], []
    for t in ts:
        L_values[t] = L(t)
        L_values[-t] = L(-t)
        fd1.append((L_values[t] - L_values[-t]) / (2.0 * t))
        fd2.append((L_values[t] + L_values[-t] - 2.0 * L_values[0.0]) / t**2)
    noisy = False
    for a, b in zip(fd1, fd1[1:]):
        if abs(b) > abs(a) * 1.2 + 1e-12:
            noisy = True
    return ShapeDerivativeCheck(
        ts=tuple(ts), L_values=L_values,
        first_derivative_estimates=tuple(fd1),
        second_derivative_estimates=tuple(fd2),
        noisy=noisy,
    )
