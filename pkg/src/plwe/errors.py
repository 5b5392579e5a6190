"""Exception types shared across the toolkit.

The CLI maps each family onto a process exit code, so library code raises
these rather than bare ``ValueError`` where the distinction matters.
"""


class PlweError(Exception):
    """Base class for toolkit errors."""


class DomainError(PlweError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(PlweError, ValueError):
    """A documented precondition of an operation does not hold."""


class CapacityError(PlweError):
    """The requested computation exceeds the configured work budget."""

    def __init__(self, message, suggestion=None):
        super().__init__(message)
        self.suggestion = suggestion


class NumericError(PlweError, ArithmeticError):
    """A floating-point procedure failed to converge or is ill-conditioned."""


class SearchExhausted(PlweError):
    """A parameter search ran out of candidates or iterations."""
