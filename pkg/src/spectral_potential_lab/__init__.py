"""Numerical experiments on the principal eigenvalue of -Laplace - V.

Library for computing, optimizing, and stress-testing the first Dirichlet
eigenvalue over bounded potentials of fixed mass, on the interval and the
disk: finite-difference eigensolvers, rearrangement and level-set tools,
fixed-point minimizers, shape calculus at the optimal ball, and empirical
probes of the quadratic stability inequality.
"""

from .errors import (
    ConfigError,
    DegenerateInputError,
    DomainError,
    GridSizeError,
    InfeasibleError,
    IterationLimitError,
    SolverError,
    StateError,
)
from .grids import (
    Grid,
    IntervalGrid,
    PolarGrid,
    RadialGrid,
    ball_indicator,
    band_indicator,
    integrate,
)
from .eigensolve import (
    EigenPair,
    Operator,
    PotentialField,
    SolveOptions,
    assemble,
    principal_eigenpair,
    rayleigh_quotient,
    second_eigenvalue,
)
from .rearrange import LevelSetSelection, bathtub_select, l1_distance, schwarz_rearrangement
from .optimize import (
    AnnulusCompetitor,
    OptimizerReport,
    annulus_competitor,
    ball_radius,
    dichotomy_diagnostic,
    minimize_delta_2d,
    minimize_delta_radial,
    minimize_global,
    optimal_potential,
)
from .shapecalc import (
    BallContext,
    FourierPerturbation,
    ModeSolution,
    ShapeDerivativeCheck,
    ball_context,
    fd_shape_check,
    hessian_quadratic_form,
    perturbed_ball_potential,
    solve_mode,
)
from .deficit import (
    DeficitReport,
    DeficitSample,
    FamilyPlan,
    deficit_ratio,
    deficit_survey,
    parametric_derivative,
    random_admissible,
    sample_admissible,
    spectral_gap,
)

__version__ = "0.1.0"
