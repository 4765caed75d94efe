"""
Small helpers shared by the subcommands.
"""

import time
from typing import Any, Callable, Tuple

import numpy as np


def timed_call(func: Callable, *args, **kwargs) -> Tuple[Any, float]:
    """
    Execute function and return result with execution time.

    Returns:
        Tuple of (result, elapsed_seconds)
    """
    start_time = time.perf_counter()
    result = func(*args, **kwargs)
    return result, time.perf_counter() - start_time


def format_significant(value: float, digits: int = 6) -> str:
    """Format a number with ``digits`` significant digits; NaN prints as 'nan'."""
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return 'nan'
    return f"{value:.{digits}g}"
