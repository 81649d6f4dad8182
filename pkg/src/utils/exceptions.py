"""
Custom exceptions for coherent-flow.

All exceptions inherit from CoherentFlowError for consistent handling.
Input problems derive from ConfigurationError, numerical failures from
NumericalError; the CLI maps the two families to distinct exit codes.
"""

from typing import Any


class CoherentFlowError(Exception):
    """Base exception for all coherent-flow errors."""

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> dict:
        """Convert exception to dictionary for JSON responses."""
        return {
            "error": self.__class__.__name__,
            "message": self.message,
            "details": self.details,
        }


class ConfigurationError(CoherentFlowError):
    """Raised when a model, config file or dataset is invalid."""

    pass


class InsufficientDataError(ConfigurationError):
    """Raised when there is not enough data for an operation."""

    pass


class NumericalError(CoherentFlowError):
    """Raised when an evaluation or optimization fails numerically."""

    pass


class PoleEvaluationError(NumericalError):
    """Raised when a transfer function is evaluated at its pole."""

    def __init__(
        self,
        message: str,
        pole: float,
        s: complex,
        index: int | None = None,
    ):
        details: dict[str, Any] = {"pole": pole, "s": str(s)}
        if index is not None:
            details["index"] = index
        super().__init__(message, details)
        self.pole = pole
        self.s = s
        self.index = index


class AlgebraicLoopError(NumericalError):
    """Raised when the feedback loop denominator 1 - L is singular."""

    def __init__(
        self,
        message: str,
        magnitude: float,
        tolerance: float,
        index: int | None = None,
    ):
        details: dict[str, Any] = {"magnitude": magnitude, "tolerance": tolerance}
        if index is not None:
            details["index"] = index
        super().__init__(message, details)
        self.magnitude = magnitude
        self.tolerance = tolerance
        self.index = index


class InfeasibleDesignError(NumericalError):
    """Raised when no stable ideal compensator exists for a plant."""

    pass


class FitConvergenceError(NumericalError):
    """Raised when no local descent converged within its evaluation budget."""

    def __init__(self, message: str, best_so_far: Any = None):
        super().__init__(message, {"has_best_so_far": best_so_far is not None})
        self.best_so_far = best_so_far
