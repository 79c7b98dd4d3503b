"""Exception types shared across the package."""


class NavflowError(Exception):
    """Base class for all navflow errors."""


class DimensionMismatch(NavflowError, ValueError):
    """Vector or matrix dimensions do not agree."""


class DomainError(NavflowError, ValueError):
    """A point lies outside the domain an operation requires."""


class ValidationError(NavflowError, ValueError):
    """A world, config, or input file violates its invariants."""


class GenerationError(NavflowError, RuntimeError):
    """Random generation exhausted its redraw budget."""


class ConvergenceError(NavflowError, RuntimeError):
    """An iterative numerical routine failed to converge."""
