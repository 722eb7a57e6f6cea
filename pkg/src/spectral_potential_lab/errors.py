"""Exception classes shared across the library."""


class GridSizeError(ValueError):
    """Field samples do not match the grid they are claimed to live on."""


class DomainError(ValueError):
    """An argument lies outside the mathematically valid range."""


class InfeasibleError(ValueError):
    """A constrained construction has no solution for the given parameters."""


class DegenerateInputError(ValueError):
    """An input is degenerate (e.g. identically zero test field)."""


class SolverError(RuntimeError):
    """A linear or eigenvalue solve failed."""


class IterationLimitError(SolverError):
    """An iterative solve hit its iteration cap before converging."""

    def __init__(self, message: str, last_residual: float | None = None):
        super().__init__(message)
        self.last_residual = last_residual


class StateError(RuntimeError):
    """An object is missing fields required by the requested operation."""


class ConfigError(ValueError):
    """A run configuration is malformed."""
