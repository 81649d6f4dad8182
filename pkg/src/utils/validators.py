"""
Input validation utilities for coherent-flow.

Provides validation functions for grids, phases and user-supplied
configuration payloads.
"""

import math
from typing import Any, TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from src.utils.exceptions import ConfigurationError, InsufficientDataError

ModelT = TypeVar("ModelT", bound=BaseModel)

TWO_PI = 2.0 * math.pi


def validate_detuning_grid(grid: Any) -> np.ndarray:
    """
    Validate a detuning grid.

    Args:
        grid: Sequence of real detunings in MHz.

    Returns:
        Grid as a 1-D float array.

    Raises:
        InsufficientDataError: If the grid is empty.
        ConfigurationError: If the grid is not finite or not strictly increasing.

    Example:
        >>> validate_detuning_grid([-1.0, 0.0, 1.0])
        array([-1.,  0.,  1.])
    """
    values = np.asarray(grid, dtype=float).ravel()
    if values.size == 0:
        raise InsufficientDataError("Detuning grid is empty")
    if not np.all(np.isfinite(values)):
        raise ConfigurationError("Detuning grid contains non-finite values")
    if values.size > 1 and not np.all(np.diff(values) > 0):
        raise ConfigurationError("Detuning grid must be strictly increasing")
    return values


def normalize_phase(phi: float) -> float:
    """
    Wrap a feedback phase into [0, 2*pi).

    Args:
        phi: Phase in radians.

    Returns:
        Equivalent phase in [0, 2*pi).
    """
    if not math.isfinite(phi):
        raise ConfigurationError(f"Feedback phase must be finite, got {phi}")
    wrapped = math.fmod(phi, TWO_PI)
    if wrapped < 0:
        wrapped += TWO_PI
    # fmod of values just below a multiple of 2*pi can round up to 2*pi
    return 0.0 if wrapped >= TWO_PI else wrapped


def validate_phase_grid(phi_grid: Any) -> np.ndarray:
    """
    Validate a phase grid for scans.

    Args:
        phi_grid: Sequence of phases in radians, each within [0, 2*pi].

    Returns:
        Phase grid as a 1-D float array.

    Raises:
        InsufficientDataError: If fewer than two phases are given.
        ConfigurationError: If a phase is outside [0, 2*pi] or order is broken.
    """
    values = np.asarray(phi_grid, dtype=float).ravel()
    if values.size < 2:
        raise InsufficientDataError("Phase grid needs at least two points")
    if np.any(values < 0.0) or np.any(values > TWO_PI + 1e-12):
        raise ConfigurationError("Phase grid must lie within [0, 2*pi]")
    if not np.all(np.diff(values) > 0):
        raise ConfigurationError("Phase grid must be strictly increasing")
    return values


def validate_mirror_index(index: int) -> int:
    """
    Validate a ring-cavity mirror index.

    Args:
        index: Zero-based mirror index.

    Returns:
        The index.

    Raises:
        ConfigurationError: If index is not in {0, 1, 2, 3}.
    """
    if not isinstance(index, (int, np.integer)) or not 0 <= index <= 3:
        raise ConfigurationError(f"Mirror index must be 0..3, got {index!r}")
    return int(index)


def describe_validation_error(error: ValidationError) -> str:
    """
    Render a pydantic ValidationError naming each offending field.

    Args:
        error: Validation error raised by a model.

    Returns:
        Single-line message such as "plant.gamma_p: Field required".
    """
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item.get("loc", ())) or "<root>"
        parts.append(f"{location}: {item.get('msg', 'invalid')}")
    return "; ".join(parts)


def parse_model(model_cls: type[ModelT], payload: Any, source: str = "input") -> ModelT:
    """
    Validate a payload against a model, raising ConfigurationError on failure.

    Args:
        model_cls: Pydantic model class.
        payload: Raw (JSON-decoded) data.
        source: Label used in error messages (usually a file name).

    Returns:
        Validated model instance.

    Raises:
        ConfigurationError: If validation fails; the message names the fields.
    """
    try:
        return model_cls.model_validate(payload)
    except ValidationError as e:
        message = f"Invalid {source}: {describe_validation_error(e)}"
        raise ConfigurationError(
            message,
            {"fields": [".".join(str(p) for p in err.get("loc", ())) for err in e.errors()]},
        ) from e
