"""Exception hierarchy shared across the package."""


class FesinvError(Exception):
    """Base class for all errors raised by fesinv."""


class InvalidArgument(FesinvError, ValueError):
    """An argument violates a documented precondition."""


class LinearSolveError(FesinvError, ArithmeticError):
    """A regularized linear system could not be solved reliably."""


class GridTooCoarse(FesinvError):
    """A radial grid does not resolve the problem to the requested accuracy."""


class NoConvergence(FesinvError):
    """An iteration hit its cap before reaching tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class InconsistencyError(FesinvError):
    """Two independent routes to the same quantity disagree."""
