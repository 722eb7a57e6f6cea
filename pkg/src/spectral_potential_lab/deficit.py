"""Empirical probes of the quantitative eigenvalue inequality.

Evaluates the deficit lambda(V) - lambda(V*) over sampled competitor
families, its ratio to the squared L1 distance, the parametric derivative
identity d/dt lambda(V + t h) = -int h u^2, and the spectral gap.
"""

from __future__ import annotations

import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InfeasibleError
from .eigensolve import (
    EigenPair,
    PotentialField,
    SolveOptions,
    principal_eigenpair,
    second_eigenvalue,
)
from .grids import Grid, IntervalGrid, PolarGrid, RadialGrid, ball_indicator, integrate
from .optimize import annulus_competitor, ball_radius, optimal_potential
from .rearrange import l1_distance
from .shapecalc import BallContext, FourierPerturbation, perturbed_ball_potential

FAMILIES = ("annulus", "radial-random", "polar-random", "normal-deformation")


@dataclass(frozen=True)
class DeficitSample:
    """One competitor evaluation: distance, deficit, and their ratio."""

    family: str
    V: PotentialField
    delta: float
    deficit: float
    ratio: float
    flagged: bool  # delta below 4 cell measures: ratio dominated by grid noise
    index: int = 0


@dataclass(frozen=True)
class DeficitReport:
    samples: tuple[DeficitSample, ...]
    min_ratio: float  # over unflagged samples
    per_family: dict[str, tuple[float, float]]  # family -> (min, median) ratio
    grid: Grid
    v0: float
    seed: int


def parametric_derivative(V: PotentialField, h: np.ndarray, eig: EigenPair) -> float:
    """Derivative of the principal eigenvalue along an admissible direction h.

    Requires V + eps*h admissible for small eps: h must have zero integral,
    be <= 0 where V is pinned at 1 and >= 0 where V is pinned at 0.  With the
    eigenfunction L2-normalized the derivative is -int h u^2.
    """
    grid = V.grid
    h = np.asarray(h, dtype=float)
    total = integrate(grid, h)
    if abs(total) > 1e-8 * max(1.0, integrate(grid, np.abs(h))):
        raise DomainError(f"direction not mass-neutral: int h = {total:g}")
    at_upper = V.values >= 1.0 - 1e-12
    if np.any(h[at_upper] > 1e-12):
        raise DomainError("direction points outward at the upper bound: h > 0 where V = 1")
    at_lower = V.values <= 1e-12
    if np.any(h[at_lower] < -1e-12):
        raise DomainError("direction points outward at the lower bound: h < 0 where V = 0")
    return -integrate(grid, h * eig.u**2)


def _grid_key(grid: Grid) -> tuple:
    if isinstance(grid, IntervalGrid):
        return ("interval", grid.a, grid.b, grid.n)
    if isinstance(grid, RadialGrid):
        return ("radial", grid.R, grid.n)
    return ("polar", grid.R, grid.nr, grid.ntheta)


_LAMBDA_STAR_CACHE: dict[tuple, float] = {}


def _lambda_star_on(grid: Grid, v0: float, opts: SolveOptions) -> float:
    key = (_grid_key(grid), round(v0, 14))
    if key not in _LAMBDA_STAR_CACHE:
        V_star = optimal_potential(grid, v0)
        _LAMBDA_STAR_CACHE[key] = principal_eigenpair(grid, V_star, opts).lam
    return _LAMBDA_STAR_CACHE[key]


def deficit_ratio(V: PotentialField, baseline: BallContext,
                  opts: SolveOptions = SolveOptions(), family: str = "custom",
                  index: int = 0) -> DeficitSample:
    """Evaluate lambda(V) - lambda(V*) and its ratio to ||V - V*||_1^2.

    lambda(V*) comes from the baseline when V lives on the baseline grid and
    is recomputed (and cached) on V's own grid otherwise, so the deficit is
    always a same-grid difference.
    """
    grid = V.grid
    V_star = optimal_potential(grid, baseline.v0)
    delta = l1_distance(V, V_star)
    if delta <= 0.0:
        raise DomainError("V coincides with the optimal ball potential; ratio undefined")
    if _grid_key(grid) == _grid_key(baseline.grid):
        lam_star = baseline.lambda_star
    else:
        lam_star = _lambda_star_on(grid, baseline.v0, opts)
    lam = principal_eigenpair(grid, V, opts).lam
    deficit = lam - lam_star
    cell = float(np.median(grid.weights))
    return DeficitSample(
        family=family, V=V, delta=delta, deficit=deficit,
        ratio=deficit / delta**2, flagged=delta < 4.0 * cell, index=index,
    )


def _rng(seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based generator: reproducible per (seed, sample index)."""
    return np.random.Generator(np.random.Philox(key=seed, counter=index))


def _random_band_level(grid: Grid, chi: np.ndarray, columns: np.ndarray | None,
                       amount: float) -> np.ndarray:
    """A field c*chi (restricted to angular columns if given) of mass `amount`."""
    sel = chi.copy()
    if columns is not None:
        keep = np.zeros_like(sel)
        keep.reshape(grid.nr, grid.ntheta)[:, columns] = 1.0
        sel *= keep
    cap = integrate(grid, sel)
    if cap < amount - 1e-12:
        raise InfeasibleError(f"region capacity {cap:g} < required mass {amount:g}")
    return (amount / cap) * sel


def sample_admissible(grid: Grid, v0: float, family: str, seed: int,
                      index: int = 0, **params) -> PotentialField:
    """Draw one admissible competitor with exact mass v0 * |domain|.

    Families: annulus(delta) — the closed-form shell competitor;
    radial-random(delta) — V* minus a random inner shell plus a random outer
    shell, each of mass delta/2; polar-random(delta) — same exchange but
    localized to random angular sectors (PolarGrid only); normal-
    deformation(g, t) — area fractions of a deformed ball, with the radius
    shifted uniformly (bisection) to restore the mass exactly.
    """
    rng = _rng(seed, index)
    r_star = ball_radius(grid, v0)
    if family == "annulus":
        return annulus_competitor(grid, v0, params["delta"]).field
    if family == "radial-random":
        delta = params["delta"]
        # random shell strictly inside the ball and one strictly outside
        a_in = rng.uniform(0.0, 0.8 * r_star)
        b_in = rng.uniform(a_in + 0.1 * r_star, r_star)
        outer_limit = grid.b - grid.center if isinstance(grid, IntervalGrid) else grid.R
        a_out = rng.uniform(r_star, 0.5 * (r_star + outer_limit))
        b_out = rng.uniform(a_out + 0.05 * (outer_limit - r_star), outer_limit)
        chi_in = _shell(grid, a_in, b_in)
        chi_out = _shell(grid, a_out, b_out)
        v = optimal_potential(grid, v0).values.copy()
        v -= _random_band_level(grid, v * chi_in, None, delta / 2.0)
        v += _random_band_level(grid, (1.0 - v) * chi_out, None, delta / 2.0)
        return PotentialField(grid, v)
    if family == "polar-random":
        if not isinstance(grid, PolarGrid):
            raise DomainError("polar-random sampling requires a PolarGrid")
        delta = params["delta"]
        nt = grid.ntheta
        width = int(rng.integers(max(2, nt // 8), nt // 2 + 1))
        start_in, start_out = rng.integers(0, nt, size=2)
        cols_in = (start_in + np.arange(width)) % nt
        cols_out = (start_out + np.arange(width)) % nt
        v = optimal_potential(grid, v0).values.copy()
        v -= _random_band_level(grid, v, cols_in, delta / 2.0)
        v += _random_band_level(grid, 1.0 - v, cols_out, delta / 2.0)
        return PotentialField(grid, v)
    if family == "normal-deformation":
        if not isinstance(grid, PolarGrid):
            raise DomainError("normal-deformation sampling requires a PolarGrid")
        g = params.get("g")
        if g is None:
            kmax = int(params.get("kmax", 4))
            alpha = rng.standard_normal(kmax)
            beta = rng.standard_normal(kmax)
            g = FourierPerturbation(alpha=alpha, beta=beta)
            scale = g.max_abs()
            g = FourierPerturbation(alpha=alpha / scale, beta=beta / scale)
        t = params.get("t")
        if t is None:
            t = float(rng.uniform(0.02, 0.08))
        return _deformed_ball(grid, params["ctx"], g, t)
    raise DomainError(f"unknown family {family!r}; valid: {', '.join(FAMILIES)}")


def _shell(grid: Grid, a: float, b: float) -> np.ndarray:
    from .grids import band_indicator

    return band_indicator(grid, a, b)


class _ShiftedBoundary:
    """Wraps a Fourier boundary perturbation with a uniform radial offset."""

    def __init__(self, g: FourierPerturbation, offset_over_t: float):
        self._g = g
        self._c = offset_over_t

    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        return self._g.evaluate(theta) + self._c

    def max_abs(self) -> float:
        return self._g.max_abs() + abs(self._c)


def _deformed_ball(grid: PolarGrid, ctx: BallContext, g: FourierPerturbation,
                   t: float) -> PotentialField:
    """Indicator of {r <= r* + t g(theta) + s}, with s chosen so the mass is exact."""
    target = ctx.v0 * grid.measure
    if t == 0.0:
        raise DomainError("deformation size t must be nonzero")

    def mass_at(s: float) -> float:
        shim = _ShiftedBoundary(g, s / t)
        return perturbed_ball_potential(grid, ctx, shim, t).mass  # type: ignore[arg-type]

    lo, hi = -0.2 * ctx.r_star, 0.2 * ctx.r_star
    if not mass_at(lo) <= target <= mass_at(hi):
        raise InfeasibleError("cannot rebalance deformed ball to the target mass")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if mass_at(mid) < target:
            lo = mid
        else:
            hi = mid
    shim = _ShiftedBoundary(g, 0.5 * (lo + hi) / t)
    return perturbed_ball_potential(grid, ctx, shim, t)  # type: ignore[arg-type]


def random_admissible(grid: Grid, v0: float, rng: np.random.Generator,
                      smooth: bool = False) -> PotentialField:
    """Random admissible potential with exact mass (bisection on a scale factor)."""
    raw = rng.random(grid.size)
    if smooth and isinstance(grid, (IntervalGrid, RadialGrid)):
        k = max(3, grid.size // 32)
        kern = np.ones(k) / k
        raw = np.convolve(raw, kern, mode="same")
    target = v0 * grid.measure
    lo, hi = 0.0, 1.0
    while integrate(grid, np.clip(hi * raw, 0.0, 1.0)) < target:
        hi *= 2.0
        if hi > 1e8:
            raise InfeasibleError(f"cannot reach mass fraction {v0} from this draw")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if integrate(grid, np.clip(mid * raw, 0.0, 1.0)) < target:
            lo = mid
        else:
            hi = mid
    return PotentialField(grid, np.clip(0.5 * (lo + hi) * raw, 0.0, 1.0))


@dataclass(frozen=True)
class FamilyPlan:
    """One survey line item: draw `count` samples from `family`."""

    family: str
    count: int
    params: dict = field(default_factory=dict)


def _survey_threads() -> int:
    raw = os.environ.get("SPL_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return (os.cpu_count() or 1) if n == 0 else max(1, n)


def deficit_survey(grid: Grid, v0: float, plan: list[FamilyPlan], seed: int,
                   opts: SolveOptions = SolveOptions(),
                   baseline: BallContext | None = None) -> DeficitReport:
    """Evaluate the deficit ratio over a sampled plan of competitor families.

    Sampling is keyed by (seed, sample index) with a counter-based generator
    and aggregation is ordered by index, so the report is identical for any
    evaluation concurrency (SPL_THREADS caps the thread pool; 0 = auto).
    """
    if not plan or any(p.count <= 0 for p in plan):
        raise DomainError("survey plan must be nonempty with positive counts")
    for p in plan:
        if p.family not in FAMILIES:
            raise DomainError(f"unknown family {p.family!r}; valid: {', '.join(FAMILIES)}")

    lam_star = _lambda_star_on(grid, v0, opts)
    pseudo = _PseudoBaseline(grid, v0, lam_star) if baseline is None else baseline

    jobs: list[tuple[int, str, dict]] = []
    idx = 0
    for p in plan:
        for _ in range(p.count):
            jobs.append((idx, p.family, p.params))
            idx += 1

    def run(job: tuple[int, str, dict]) -> DeficitSample:
        i, fam, params = job
        resolved = dict(params)
        if fam in ("annulus", "radial-random", "polar-random") and "delta" not in resolved:
            lo, hi = resolved.pop("delta_range", (0.02, 0.1))
            resolved["delta"] = float(_rng(seed, i).uniform(lo, hi))
        V = sample_admissible(grid, v0, fam, seed, index=i, **resolved)
        return deficit_ratio(V, pseudo, opts, family=fam, index=i)

    threads = _survey_threads()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(run, jobs))
    else:
        samples = [run(j) for j in jobs]
    samples.sort(key=lambda s: s.index)

    unflagged = [s.ratio for s in samples if not s.flagged]
    per_family: dict[str, tuple[float, float]] = {}
    for p in plan:
        rs = [s.ratio for s in samples if s.family == p.family]
        per_family[p.family] = (min(rs), statistics.median(rs))
    return DeficitReport(
        samples=tuple(samples),
        min_ratio=min(unflagged) if unflagged else float("nan"),
        per_family=per_family, grid=grid, v0=v0, seed=seed,
    )


class _PseudoBaseline:
    """Minimal baseline stand-in for geometries without a radial BallContext."""

    def __init__(self, grid: Grid, v0: float, lambda_star: float):
        self.grid = grid
        self.v0 = v0
        self.lambda_star = lambda_star


def spectral_gap(grid: Grid, V: PotentialField,
                 opts: SolveOptions = SolveOptions()) -> float:
    """lambda_2(V) - lambda_1(V); strictly positive for admissible V."""
    lam1 = principal_eigenpair(grid, V, opts).lam
    lam2 = second_eigenvalue(grid, V, opts)
    return lam2 - lam1
