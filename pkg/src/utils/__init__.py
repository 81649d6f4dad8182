"""
Utility functions for coherent-flow.

Exports:
    - Exceptions
    - Decorators
    - Validators
"""

from src.utils.decorators import (
    EXIT_INVALID_INPUT,
    EXIT_NUMERICAL_FAILURE,
    EXIT_OK,
    exit_codes,
    log_execution_time,
)
from src.utils.exceptions import (
    AlgebraicLoopError,
    CoherentFlowError,
    ConfigurationError,
    FitConvergenceError,
    InfeasibleDesignError,
    InsufficientDataError,
    NumericalError,
    PoleEvaluationError,
)
from src.utils.validators import (
    describe_validation_error,
    normalize_phase,
    parse_model,
    validate_detuning_grid,
    validate_mirror_index,
    validate_phase_grid,
)

__all__ = [
    # Exceptions
    "CoherentFlowError",
    "ConfigurationError",
    "InsufficientDataError",
    "NumericalError",
    "PoleEvaluationError",
    "AlgebraicLoopError",
    "InfeasibleDesignError",
    "FitConvergenceError",
    # Decorators
    "log_execution_time",
    "exit_codes",
    "EXIT_OK",
    "EXIT_INVALID_INPUT",
    "EXIT_NUMERICAL_FAILURE",
    # Validators
    "validate_detuning_grid",
    "normalize_phase",
    "validate_phase_grid",
    "validate_mirror_index",
    "describe_validation_error",
    "parse_model",
]
