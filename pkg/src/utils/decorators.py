"""
Utility decorators for coherent-flow.

Provides timing and exit-code mapping decorators.
"""

import functools
import logging
import time
from typing import Callable, TypeVar

from pydantic import ValidationError

from src.utils.exceptions import ConfigurationError, NumericalError

T = TypeVar("T")
logger = logging.getLogger("coherent-flow.decorators")

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_NUMERICAL_FAILURE = 3


def log_execution_time(func: Callable[..., T]) -> Callable[..., T]:
    """
    Log function execution time.

    Args:
        func: Function to wrap.

    Returns:
        Decorated function.

    Example:
        >>> @log_execution_time
        ... def sweep(plant, comp, env, grid):
        ...     return frequency_sweep(plant, comp, env, grid)
    """

    @functools.wraps(func)
    def wrapper(*args, **kwargs) -> T:
        start = time.perf_counter()
        try:
            result = func(*args, **kwargs)
            elapsed = (time.perf_counter() - start) * 1000
            logger.debug("%s completed in %.2fms", func.__name__, elapsed)
            return result
        except Exception as e:
            elapsed = (time.perf_counter() - start) * 1000
            logger.error("%s failed after %.2fms: %s", func.__name__, elapsed, str(e))
            raise

    return wrapper


def exit_codes(func: Callable[..., int]) -> Callable[..., int]:
    """
    Translate command failures into the CLI exit-code contract.

    ConfigurationError (and raw pydantic ValidationError) maps to 2,
    NumericalError to 3. The message is printed to stderr-bound logging.

    Args:
        func: Command function returning an exit code.

    Returns:
        Decorated function.

    Example:
        >>> @exit_codes
        ... def cmd_sweep(args):
        ...     return 0
    """

    @functools.wraps(func)
    def wrapper(*args, **kwargs) -> int:
        try:
            return func(*args, **kwargs)
        except ValidationError as e:
            logger.error("%s: invalid input - %s", func.__name__, e)
            return EXIT_INVALID_INPUT
        except ConfigurationError as e:
            logger.error("%s: %s", func.__name__, e.message)
            return EXIT_INVALID_INPUT
        except NumericalError as e:
            logger.error("%s: numerical failure - %s %s", func.__name__, e.message, e.details)
            return EXIT_NUMERICAL_FAILURE

    return wrapper
