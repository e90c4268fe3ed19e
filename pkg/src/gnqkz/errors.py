"""Exception types shared across the package.

Each class maps to one exit code of the command-line front end.
"""


class GnqkzError(Exception):
    """Base class for all package errors."""


class DomainError(GnqkzError, ValueError):
    """Arguments outside the domain where a formula or quadrature is valid."""


class SingularityError(GnqkzError, ArithmeticError):
    """An R- or S-matrix was evaluated at (or numerically on) its pole."""


class CapacityError(GnqkzError):
    """A dense representation would exceed the configured size cap."""


class NumericError(GnqkzError, ArithmeticError):
    """Linear algebra or a fit produced an unreliable result."""


class ConvergenceError(NumericError):
    """An iterative solver ran out of iterations."""

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual
