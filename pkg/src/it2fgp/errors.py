"""Exception hierarchy shared across the package."""

from __future__ import annotations


class It2FgpError(Exception):
    """Base class for all package errors."""


class InvalidHeightError(It2FgpError):
    """Trapezoid height outside (0, 1]."""


class InvalidNumberError(It2FgpError):
    """Non-finite field in a fuzzy number."""


class DivisionByZeroError(It2FgpError):
    """Reciprocal scaling with k = 0."""


class EvalDomainError(It2FgpError):
    """Signomial evaluated outside its domain (negative base with
    fractional exponent, or zero with a negative exponent)."""


class SingularGradientError(It2FgpError):
    """Gradient singular at a clamped boundary.

    Attributes:
        var_index: index of the offending variable.
    """

    def __init__(self, message: str, var_index: int):
        super().__init__(message)
        self.var_index = var_index


class StructuralError(It2FgpError):
    """Model is structurally malformed (dimension mismatch, empty parts)."""


class DegenerateGoalError(It2FgpError):
    """Fuzzy goal with a collapsed tolerance interval."""


class InfeasibleError(It2FgpError):
    """No feasible point found (or proven infeasible for an LP)."""


class NonConvergenceError(It2FgpError):
    """Iteration budget exhausted above the feasibility tolerance.

    Attributes:
        best_x: best point found so far.
        violation: its scaled constraint violation.
    """

    def __init__(self, message: str, best_x=None, violation: float | None = None):
        super().__init__(message)
        self.best_x = best_x
        self.violation = violation


class DegeneratePivotError(It2FgpError):
    """Simplex pivot element below the numerical threshold."""


class UnsupportedError(It2FgpError):
    """Instance outside an oracle's supported size."""


class InvalidStateError(It2FgpError):
    """Operation applied to a session in the wrong state."""


class NoProgressError(It2FgpError):
    """Tolerance update would collapse a goal interval; state unchanged."""


class FileFormatError(It2FgpError):
    """Malformed problem / decision / trace file."""
