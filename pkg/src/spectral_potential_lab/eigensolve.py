"""Dirichlet operator -Laplace - V on each grid and its lowest eigenpairs.

The operator is assembled in node-value form and then symmetrized by the
diagonal similarity D = diag(sqrt(cell measure)); in the symmetrized basis
Euclidean inner products coincide with grid L2 inner products, so standard
symmetric spectral theory (variational bounds, orthogonal deflation) applies
verbatim at the discrete level.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DegenerateInputError, DomainError, GridSizeError, IterationLimitError
from .grids import Grid, IntervalGrid, PolarGrid, RadialGrid, check_samples, integrate


@dataclass(frozen=True)
class PotentialField:
    """Grid-sampled potential with values in [0, 1] and recorded mass."""

    grid: Grid
    values: np.ndarray
    mass: float = field(init=False)

    def __post_init__(self):
        v = check_samples(self.grid, self.values)
        if v.min() < -1e-12 or v.max() > 1.0 + 1e-12:
            raise DomainError(
                f"potential values must lie in [0, 1], got range [{v.min()}, {v.max()}]"
            )
        v = np.clip(v, 0.0, 1.0)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "mass", integrate(self.grid, v))


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalue with L2-normalized nonnegative (if principal) eigenfunction."""

    lam: float
    u: np.ndarray
    residual: float
    which: int = 1


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-11
    max_iter: int = 400
    shift_guess: float | None = None

    def __post_init__(self):
        if self.tol <= 0:
            raise DomainError("tol must be positive")


class Operator:
    """Assembled -Laplace - V with Dirichlet rows eliminated."""

    def __init__(self, grid: Grid, matrix_sym: sp.csr_matrix, sqrt_w: np.ndarray):
        self.grid = grid
        self.matrix_sym = matrix_sym
        self.sqrt_w = sqrt_w

    def apply_node(self, u: np.ndarray) -> np.ndarray:
        """Operator action in node values: (-Laplace - V) u."""
        return (self.matrix_sym @ (self.sqrt_w * u)) / self.sqrt_w

    def bilinear(self, u: np.ndarray, w: np.ndarray) -> float:
        """Grid form of int grad(u).grad(w) - int V u w."""
        return float(np.dot(self.sqrt_w * u, self.matrix_sym @ (self.sqrt_w * w)))


def assemble(grid: Grid, V: PotentialField) -> Operator:
    """Assemble -Laplace - V on the grid, symmetrized by sqrt cell measures."""
    if V.grid is not grid and V.grid != grid:
        raise GridSizeError("potential lives on a different grid")
    v = V.values
    if isinstance(grid, IntervalGrid):
        h2 = grid.h**2
        main = np.full(grid.n, 2.0 / h2) - v
        off = np.full(grid.n - 1, -1.0 / h2)
        A = sp.diags([off, main, off], [-1, 0, 1], format="csr")
    elif isinstance(grid, RadialGrid):
        r, h = grid.nodes, grid.h
        diag = (2.0 * r) / (r * h * h)  # (r_{i+1/2} + r_{i-1/2}) / (r_i h^2)
        diag[0] = (r[0] + h / 2.0) / (r[0] * h * h)  # inner flux dropped (u'(0)=0)
        upper = -(r[:-1] + h / 2.0) / (r[:-1] * h * h)  # row i -> node i+1
        lower = -(r[1:] - h / 2.0) / (r[1:] * h * h)  # row i+1 -> node i
        A = sp.diags([lower, diag - v, upper], [-1, 0, 1], format="csr")
    elif isinstance(grid, PolarGrid):
        A = _assemble_polar(grid, v)
    else:  # pragma: no cover
        raise TypeError(f"unsupported grid type {type(grid)!r}")

    sqrt_w = np.sqrt(grid.weights)
    D = sp.diags(sqrt_w)
    Dinv = sp.diags(1.0 / sqrt_w)
    A_sym = (D @ A @ Dinv).tocsr()
    A_sym = (A_sym + A_sym.T) * 0.5  # scrub roundoff asymmetry
    return Operator(grid, A_sym, sqrt_w)


def _assemble_polar(grid: PolarGrid, v: np.ndarray) -> sp.csr_matrix:
    nr, nt = grid.nr, grid.ntheta
    dr, dth = grid.dr, grid.dtheta
    r = grid.r
    rows, cols, vals = [], [], []

    def add(i, j, i2, j2, val):
        rows.append(i * nt + j)
        cols.append(i2 * nt + j2)
        vals.append(val)

    r_up = r + dr / 2.0
    r_dn = r - dr / 2.0
    for i in range(nr):
        rad_diag = (r_up[i] + r_dn[i]) / (r[i] * dr * dr)
        ang = 1.0 / (r[i] ** 2 * dth * dth)
        for j in range(nt):
            add(i, j, i, j, rad_diag + 2.0 * ang)
            add(i, j, i, (j + 1) % nt, -ang)
            add(i, j, i, (j - 1) % nt, -ang)
            if i + 1 < nr:
                add(i, j, i + 1, j, -r_up[i] / (r[i] * dr * dr))
            if i > 0:
                add(i, j, i - 1, j, -r_dn[i] / (r[i] * dr * dr))
    # pole condition: value at r=0 is the mean of the first ring
    c = r_dn[0] / (r[0] * dr * dr)
    for j in range(nt):
        for l in range(nt):
            add(0, j, 0, l, -c / nt)
    A = sp.coo_matrix((vals, (rows, cols)), shape=(nr * nt, nr * nt)).tocsr()
    return A - sp.diags(v)


def _inverse_iteration(A: sp.csr_matrix, tol: float, max_iter: int, shift: float):
    """Shifted inverse power iteration with a Rayleigh-quotient polish.

    Starts from the all-ones vector for determinism.  Returns
    (lam, y, residual) in the symmetrized basis.
    """
    n = A.shape[0]
    y = np.ones(n)
    y /= np.linalg.norm(y)
    lu = spla.splu((A - shift * sp.identity(n, format="csc")).tocsc())
    lam = float(np.dot(y, A @ y))
    res = np.inf
    sigma = shift
    # smallest residual representable for this operator in float64
    floor = 100.0 * np.finfo(float).eps * float(np.abs(A.diagonal()).max())
    for it in range(max_iter):
        z = lu.solve(y)
        nz = np.linalg.norm(z)
        if nz == 0.0 or not np.isfinite(nz):
            raise IterationLimitError("inverse iteration produced a degenerate vector", res)
        y = z / nz
        lam = float(np.dot(y, A @ y))
        res = float(np.linalg.norm(A @ y - lam * y))
        if res <= max(tol * (1.0 + abs(lam)), floor):
            return lam, y, res
        # once roughly converged, refactor at the Rayleigh quotient (cubic polish)
        if res < 1e-3 * (1.0 + abs(lam)) and abs(lam - sigma) > 1e3 * tol * (1.0 + abs(lam)):
            sigma = lam
            try:
                lu = spla.splu((A - sigma * sp.identity(n, format="csc")).tocsc())
            except RuntimeError:
                sigma = lam * (1.0 + 1e-10) + 1e-12
                lu = spla.splu((A - sigma * sp.identity(n, format="csc")).tocsc())
    raise IterationLimitError(
        f"eigen iteration did not reach tol {tol} in {max_iter} steps", res
    )


def principal_eigenpair(grid: Grid, V: PotentialField, opts: SolveOptions = SolveOptions()) -> EigenPair:
    """Smallest eigenvalue and its normalized nonnegative eigenfunction."""
    op = assemble(grid, V)
    shift = opts.shift_guess if opts.shift_guess is not None else -4.0
    lam, y, res = _inverse_iteration(op.matrix_sym, opts.tol, opts.max_iter, shift)
    if y.sum() < 0:
        y = -y
    u = y / op.sqrt_w
    return EigenPair(lam=lam, u=u, residual=res, which=1)


def _block_inverse_iteration(A: sp.csr_matrix, tol: float, max_iter: int, shift: float,
                             nev: int, start: np.ndarray):
    """Block inverse iteration with Ritz projection.

    Robust to clustered eigenvalues (e.g. the split cos/sin pair on nearly
    radial potentials), which stall single-vector deflation.  Returns the
    nev lowest Ritz values with their residuals, in the symmetrized basis.
    """
    n = A.shape[0]
    block = min(max(nev + 3, 5), n - 1)
    extra = np.cos(np.outer(np.arange(n), 0.7 + 0.31 * np.arange(block - 1)))
    Y, _ = np.linalg.qr(np.hstack([start[:, None], extra]))
    lu = spla.splu((A - shift * sp.identity(n, format="csc")).tocsc())
    floor = 100.0 * np.finfo(float).eps * float(np.abs(A.diagonal()).max())
    lams = np.zeros(nev)
    res = np.full(nev, np.inf)
    for _ in range(max_iter):
        Z = lu.solve(Y)
        Q, _ = np.linalg.qr(Z)
        B = Q.T @ (A @ Q)
        B = 0.5 * (B + B.T)
        theta, S = np.linalg.eigh(B)
        Y = Q @ S
        lams = theta[:nev]
        R = A @ Y[:, :nev] - Y[:, :nev] * lams
        res = np.linalg.norm(R, axis=0)
        if np.all(res <= np.maximum(tol * (1.0 + np.abs(lams)), floor)):
            return lams, Y[:, :nev], res
    raise IterationLimitError(
        f"block eigen iteration did not reach tol {tol} in {max_iter} steps", float(res.max())
    )


def _ramp(grid: Grid) -> np.ndarray:
    """Smooth coordinate ramp with overlap on the lowest antisymmetric mode."""
    if isinstance(grid, IntervalGrid):
        c = (grid.nodes - grid.center) / (grid.b - grid.a)
    elif isinstance(grid, RadialGrid):
        c = grid.nodes / grid.R
    else:
        c = (np.repeat(grid.r, grid.ntheta) * np.cos(np.tile(grid.theta, grid.nr))) / grid.R
    return 1.0 + 2.0 * c


def second_eigenvalue(grid: Grid, V: PotentialField, opts: SolveOptions = SolveOptions()) -> float:
    """Second-smallest eigenvalue via block iteration over the lowest cluster."""
    op = assemble(grid, V)
    shift = opts.shift_guess if opts.shift_guess is not None else -4.0
    lams, _, _ = _block_inverse_iteration(
        op.matrix_sym, opts.tol, opts.max_iter, shift, nev=2, start=_ramp(grid)
    )
    return float(lams[1])


def rayleigh_quotient(grid: Grid, V: PotentialField, w: np.ndarray) -> float:
    """(int |grad w|^2 - int V w^2) / int w^2 through the assembled form."""
    w = check_samples(grid, w)
    op = assemble(grid, V)
    denom = integrate(grid, w * w)
    if denom <= 0.0:
        raise DegenerateInputError("test field has zero L2 norm")
    return op.bilinear(w, w) / denom
