"""Fixed-point optimizers for the global and distance-constrained problems,
the closed-form annulus competitor, and level-set diagnostics.

The L1 constraint ||V - V*||_1 = delta is enforced structurally: every
iterate places mass m* - delta/2 inside the optimal ball and delta/2 outside,
so iterates are feasible exactly (at cell granularity) at every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleError, StateError
from .eigensolve import PotentialField, SolveOptions, principal_eigenpair
from .grids import (
    Grid,
    IntervalGrid,
    PolarGrid,
    RadialGrid,
    ball_indicator,
    band_indicator,
    integrate,
)
from .rearrange import bathtub_select, l1_distance


def ball_radius(grid: Grid, v0: float) -> float:
    """Radius r* of the centered ball/interval holding mass v0*|domain|."""
    if not 0.0 < v0 < 1.0:
        raise InfeasibleError(f"mean fraction v0 must lie in (0, 1), got {v0}")
    if isinstance(grid, IntervalGrid):
        return 0.5 * v0 * (grid.b - grid.a)
    return grid.R * math.sqrt(v0)


def optimal_potential(grid: Grid, v0: float) -> PotentialField:
    """The minimizer V* = indicator of the centered ball, area-fraction sampled."""
    return PotentialField(grid, ball_indicator(grid, ball_radius(grid, v0)))


@dataclass(frozen=True)
class AnnulusCompetitor:
    """Ball-minus-shell plus outer-shell competitor at L1 distance delta."""

    r_star: float
    r_delta: float
    r_delta_prime: float
    field: PotentialField


@dataclass
class OptimizerReport:
    V: PotentialField
    lam: float
    iterations: int
    converged: bool
    mu_delta: float | None = None
    eta_delta: float | None = None
    zeta_delta: float | None = None
    f_delta: float | None = None
    history: list[float] = field(default_factory=list)
    u: np.ndarray | None = None
    v0: float | None = None
    delta: float | None = None
    mask_bstar: np.ndarray | None = None


def annulus_competitor(grid: RadialGrid | IntervalGrid, v0: float, delta: float) -> AnnulusCompetitor:
    """The annular competitor: retreat the ball boundary by r_delta and add a
    shell of width r'_delta outside, each side carrying mass delta/2."""
    r_star = ball_radius(grid, v0)
    mass_star = v0 * grid.measure
    if not 0.0 < delta < 2.0 * min(mass_star, grid.measure - mass_star):
        raise InfeasibleError(
            f"delta={delta} infeasible for v0={v0} (needs 0 < delta < "
            f"{2.0 * min(mass_star, grid.measure - mass_star)})"
        )
    if isinstance(grid, IntervalGrid):
        r_d = r_dp = delta / 4.0
    else:
        r_d = r_star - math.sqrt(r_star**2 - delta / (2.0 * math.pi))
        r_dp = math.sqrt(r_star**2 + delta / (2.0 * math.pi)) - r_star
    inner = ball_indicator(grid, r_star - r_d)
    shell = band_indicator(grid, r_star, r_star + r_dp)
    return AnnulusCompetitor(
        r_star=r_star,
        r_delta=r_d,
        r_delta_prime=r_dp,
        field=PotentialField(grid, np.clip(inner + shell, 0.0, 1.0)),
    )


def _mass_threshold(grid: Grid, u: np.ndarray, mass: float) -> float:
    """Level zeta with measure({u > zeta}) = mass (weighted quantile)."""
    order = np.argsort(-u, kind="stable")
    cum = np.cumsum(grid.weights[order])
    k = int(np.searchsorted(cum, mass, side="left"))
    k = min(k, u.size - 1)
    return float(u[order[k]])


def _stopped(grid: Grid, V_new: PotentialField, V_old: PotentialField,
             lam_new: float, lam_old: float, mass_star: float) -> bool:
    tol_v = max(1e-3 * mass_star, 2.0 * float(np.median(grid.weights)))
    return l1_distance(V_new, V_old) < tol_v and abs(lam_new - lam_old) < 1e-9


def _fixed_point(grid: Grid, V: PotentialField, step, opts: SolveOptions,
                 mass_star: float, max_iter: int = 60):
    """Run the bathtub fixed-point map; handles 2-cycles by keeping the
    better iterate and reporting non-convergence."""
    history: list[float] = []
    prev_values = None
    lam_old = math.inf
    eig = principal_eigenpair(grid, V, opts)
    converged = False
    it = 0
    extras = {}
    for it in range(1, max_iter + 1):
        V_new, extras = step(eig)
        eig_new = principal_eigenpair(grid, V_new, opts)
        history.append(eig_new.lam)
        if _stopped(grid, V_new, V, eig_new.lam, eig.lam, mass_star):
            V, eig = V_new, eig_new
            converged = True
            break
        if prev_values is not None and np.allclose(V_new.values, prev_values, atol=1e-12):
            # 2-cycle: keep the iterate with smaller eigenvalue, flag it
            if eig.lam < eig_new.lam:
                pass  # keep current V, eig
            else:
                V, eig = V_new, eig_new
            converged = False
            break
        prev_values = V.values
        lam_old = eig.lam
        V, eig = V_new, eig_new
    return V, eig, it, converged, history, extras


def minimize_global(grid: Grid, v0: float, opts: SolveOptions = SolveOptions()) -> OptimizerReport:
    """Fixed-point minimization of lambda over all admissible potentials."""
    mass_star = integrate(grid, optimal_potential(grid, v0).values)
    V = PotentialField(grid, np.full(grid.size, v0))

    def step(eig):
        sel = bathtub_select(grid, eig.u, mass_star)
        return PotentialField(grid, sel.chi), {"mu": sel.threshold}

    V, eig, it, converged, history, extras = _fixed_point(grid, V, step, opts, mass_star)
    return OptimizerReport(
        V=V, lam=eig.lam, iterations=it, converged=converged,
        mu_delta=extras.get("mu"), history=history, u=eig.u, v0=v0,
        mask_bstar=ball_indicator(grid, ball_radius(grid, v0)),
    )


def _minimize_delta(grid: Grid, v0: float, delta: float, opts: SolveOptions,
                    start: PotentialField | None = None) -> OptimizerReport:
    r_star = ball_radius(grid, v0)
    mask_in = ball_indicator(grid, r_star)
    mask_out = 1.0 - mask_in
    mass_star = integrate(grid, mask_in)
    if delta < 0 or delta / 2.0 > min(mass_star, grid.measure - mass_star):
        raise InfeasibleError(f"delta={delta} infeasible for v0={v0} on this grid")
    m_in = mass_star - delta / 2.0
    m_out = delta / 2.0

    def step(eig):
        inner = bathtub_select(grid, eig.u, m_in, mask=mask_in)
        outer = bathtub_select(grid, eig.u, m_out, mask=mask_out)
        Vn = PotentialField(grid, np.clip(inner.chi + outer.chi, 0.0, 1.0))
        return Vn, {
            "mu": inner.threshold,
            "eta": outer.threshold if m_out > 0 else inner.threshold,
        }

    V0 = start if start is not None else PotentialField(grid, mask_in)
    V, eig, it, converged, history, extras = _fixed_point(grid, V0, step, opts, mass_star)
    zeta = _mass_threshold(grid, eig.u, mass_star)
    report = OptimizerReport(
        V=V, lam=eig.lam, iterations=it, converged=converged,
        mu_delta=extras.get("mu"), eta_delta=extras.get("eta"), zeta_delta=zeta,
        history=history, u=eig.u, v0=v0, delta=delta, mask_bstar=mask_in,
    )
    report.f_delta = dichotomy_diagnostic(report)
    return report


def minimize_delta_radial(grid: RadialGrid | IntervalGrid, v0: float, delta: float,
                          opts: SolveOptions = SolveOptions(),
                          start: PotentialField | None = None) -> OptimizerReport:
    """Minimize lambda under ||V - V*||_1 = delta with radial symmetry built in."""
    return _minimize_delta(grid, v0, delta, opts, start)


def minimize_delta_2d(grid: PolarGrid, v0: float, delta: float,
                      opts: SolveOptions = SolveOptions(),
                      start: PotentialField | None = None) -> OptimizerReport:
    """Same alternating scheme on the full polar disk (no symmetry imposed)."""
    return _minimize_delta(grid, v0, delta, opts, start)


def dichotomy_diagnostic(report: OptimizerReport) -> float:
    """Mass of the top-level set {u >= zeta} spilling outside the optimal ball.

    Vanishes when the minimizer keeps the annular structure (the level set of
    mass m* is then the ball itself) and grows to delta/2 when the minimizer
    is a genuine deformation of the ball, so it discriminates the two regimes
    of the small-delta analysis.
    """
    if report.u is None or report.zeta_delta is None or report.mask_bstar is None:
        raise StateError("report lacks eigenfunction or thresholds")
    grid = report.V.grid
    above = report.u >= report.zeta_delta
    return float(np.dot(grid.weights * (1.0 - report.mask_bstar), above.astype(float)))
