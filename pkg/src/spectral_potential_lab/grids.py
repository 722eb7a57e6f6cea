"""Discretizations of the three geometries: interval, radial disk section, polar disk.

All grids are uniform, carry strictly positive cell measures, and exclude
Dirichlet boundary nodes.  The radial grids also exclude r = 0; the symmetry
condition u'(0) = 0 is imposed in the operator stencil instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GridSizeError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class IntervalGrid:
    """Uniform interior nodes on (a, b) with Dirichlet endpoints eliminated."""

    a: float
    b: float
    n: int
    h: float = field(init=False)
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.b > self.a:
            raise DomainError(f"interval requires b > a, got ({self.a}, {self.b})")
        if self.n < 3:
            raise DomainError(f"interval grid needs n >= 3, got {self.n}")
        h = (self.b - self.a) / (self.n + 1)
        nodes = self.a + h * np.arange(1, self.n + 1)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", np.full(self.n, h))

    @property
    def size(self) -> int:
        return self.n

    @property
    def measure(self) -> float:
        return self.b - self.a

    @property
    def center(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def radii(self) -> np.ndarray:
        """Distance of each node to the domain center."""
        return np.abs(self.nodes - self.center)


@dataclass(frozen=True)
class RadialGrid:
    """Radial section of the disk B(0, R): nodes r_i = i*h, i = 1..n.

    Cell measures are the 2-D area weights 2*pi*r_i*h, so quadrature over this
    grid approximates integrals over the full disk of radially symmetric
    integrands.
    """

    R: float
    n: int
    dim: int = 2
    h: float = field(init=False)
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.R <= 0:
            raise DomainError(f"disk radius must be positive, got {self.R}")
        if self.n < 3:
            raise DomainError(f"radial grid needs n >= 3, got {self.n}")
        if self.dim != 2:
            raise DomainError("only the two-dimensional disk is supported")
        h = self.R / (self.n + 1)
        nodes = h * np.arange(1, self.n + 1)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", TWO_PI * nodes * h)

    @property
    def size(self) -> int:
        return self.n

    @property
    def measure(self) -> float:
        return np.pi * self.R**2

    @property
    def radii(self) -> np.ndarray:
        return self.nodes


@dataclass(frozen=True)
class PolarGrid:
    """Full polar discretization of the disk B(0, R).

    Radial nodes r_i = i*dr (i = 1..nr, Dirichlet ring at r = R eliminated),
    angular nodes theta_j uniform on [0, 2*pi).  ntheta must be even so that
    cosine/sine modes up to k = ntheta/2 - 1 are representable.  Fields are
    stored flattened with angular index fastest: index = (i-1)*ntheta + j.
    """

    R: float
    nr: int
    ntheta: int
    dr: float = field(init=False)
    dtheta: float = field(init=False)
    r: np.ndarray = field(init=False, repr=False)
    theta: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.R <= 0:
            raise DomainError(f"disk radius must be positive, got {self.R}")
        if self.nr < 3:
            raise DomainError(f"polar grid needs nr >= 3, got {self.nr}")
        if self.ntheta < 4 or self.ntheta % 2 != 0:
            raise DomainError(f"ntheta must be even and >= 4, got {self.ntheta}")
        dr = self.R / (self.nr + 1)
        dtheta = TWO_PI / self.ntheta
        r = dr * np.arange(1, self.nr + 1)
        theta = dtheta * np.arange(self.ntheta)
        w = np.repeat(r * dr * dtheta, self.ntheta)
        object.__setattr__(self, "dr", dr)
        object.__setattr__(self, "dtheta", dtheta)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.nr * self.ntheta

    @property
    def measure(self) -> float:
        return np.pi * self.R**2

    @property
    def radii(self) -> np.ndarray:
        """Per-node radius, flattened consistently with field storage."""
        return np.repeat(self.r, self.ntheta)

    @property
    def h(self) -> float:
        return self.dr


Grid = IntervalGrid | RadialGrid | PolarGrid


def check_samples(grid: Grid, f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape == (grid.size,):
        return f
    if isinstance(grid, PolarGrid) and f.shape == (grid.nr, grid.ntheta):
        return f.reshape(-1)
    raise GridSizeError(f"field of shape {f.shape} does not fit grid of size {grid.size}")


def integrate(grid: Grid, f: np.ndarray) -> float:
    """Quadrature sum(w_i * f_i) over the grid cells."""
    f = check_samples(grid, f)
    return float(np.dot(grid.weights, f))


def boundary_circle_integral(grid: RadialGrid | PolarGrid, radius: float, g) -> float:
    """Integral over the circle of given radius of an angular trace g.

    For a PolarGrid, g holds per-angle samples and the trapezoid rule on the
    periodic circle applies; for a RadialGrid, g is a radially symmetric
    scalar and the result is 2*pi*radius*g.
    """
    if not 0.0 < radius < grid.R:
        raise DomainError(f"circle radius {radius} outside (0, {grid.R})")
    if isinstance(grid, RadialGrid):
        return TWO_PI * radius * float(g)
    g = np.asarray(g, dtype=float)
    if g.shape != (grid.ntheta,):
        raise GridSizeError(f"angular trace of shape {g.shape}, expected ({grid.ntheta},)")
    return radius * float(np.sum(g)) * grid.dtheta


# ---------------------------------------------------------------------------
# Fractional indicators of radially symmetric bands.
#
# Cells straddling a band edge receive the exact fraction of their measure
# inside the band (length fraction on the interval, area fraction on the
# disk), so masses and L1 distances are resolved below cell granularity and
# eigenvalues depend smoothly on band radii.
# ---------------------------------------------------------------------------


def _interval_overlap(lo: np.ndarray, hi: np.ndarray, a: float, b: float) -> np.ndarray:
    return np.clip(np.minimum(hi, b) - np.maximum(lo, a), 0.0, None)


def band_indicator(grid: Grid, a: float, b: float) -> np.ndarray:
    """Fractional samples of the indicator of {a <= |x - center| <= b}."""
    if b < a:
        raise DomainError(f"band requires a <= b, got [{a}, {b}]")
    if isinstance(grid, IntervalGrid):
        h = grid.h
        x = grid.nodes - grid.center
        lo, hi = np.abs(x) - h / 2.0, np.abs(x) + h / 2.0
        # cells live in |x| coordinates; a cell containing the center folds onto itself
        frac = _interval_overlap(lo, hi, a, b)
        fold = lo < 0
        frac[fold] = _interval_overlap(np.zeros(fold.sum()), hi[fold], a, b) + _interval_overlap(
            np.zeros(fold.sum()), -lo[fold], a, b
        )
        return frac / h
    r = grid.radii
    h = grid.h
    r_lo, r_hi = r - h / 2.0, r + h / 2.0
    inner = np.maximum(r_lo, a)
    outer = np.minimum(r_hi, b)
    area = np.clip(outer**2 - inner**2, 0.0, None)
    return area / (r_hi**2 - r_lo**2)


def ball_indicator(grid: Grid, radius: float) -> np.ndarray:
    """Fractional samples of the centered ball/interval indicator."""
    return band_indicator(grid, 0.0, radius)
