"""
Input validation utilities.

The ``is_valid_*`` predicates return booleans; the ``require_*`` guards raise
``ParameterError`` naming the invariant that was violated.
"""

import math
from typing import Any

import numpy as np

from rheobrown.core.exceptions import GridError, ParameterError


def is_valid_positive(value: Any) -> bool:
    """
    Validate a strictly positive finite real number.

    Args:
        value: Value to validate

    Returns:
        True if valid, False otherwise
    """
    try:
        value = float(value)
    except (TypeError, ValueError):
        return False
    return math.isfinite(value) and value > 0.0


def is_valid_non_negative(value: Any) -> bool:
    """
    Validate a finite real number that is zero or positive.

    Args:
        value: Value to validate

    Returns:
        True if valid, False otherwise
    """
    try:
        value = float(value)
    except (TypeError, ValueError):
        return False
    return math.isfinite(value) and value >= 0.0


def is_valid_alpha(alpha: Any) -> bool:
    """
    Validate a springpot order in the closed interval [0, 1].

    Args:
        alpha: Fractional order

    Returns:
        True if valid, False otherwise
    """
    try:
        alpha = float(alpha)
    except (TypeError, ValueError):
        return False
    return 0.0 <= alpha <= 1.0


def is_valid_dimension(n_dims: Any) -> bool:
    """
    Validate the number of spatial dimensions.

    Args:
        n_dims: Number of dimensions

    Returns:
        True if n_dims is exactly 1, 2 or 3
    """
    return isinstance(n_dims, (int, np.integer)) and not isinstance(n_dims, bool) and n_dims in (1, 2, 3)


def is_ascending(grid: Any) -> bool:
    """
    Validate a strictly ascending one-dimensional grid.

    Args:
        grid: Sequence of grid points

    Returns:
        True if strictly ascending, False otherwise
    """
    grid = np.asarray(grid, dtype=float)
    return grid.ndim == 1 and grid.size > 0 and bool(np.all(np.diff(grid) > 0.0))


def is_uniform_grid(grid: Any, rtol: float = 1e-9) -> bool:
    """
    Validate an ascending grid with constant spacing.

    Args:
        grid: Sequence of grid points
        rtol: Relative tolerance on the spacing

    Returns:
        True if uniform, False otherwise
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or not is_ascending(grid):
        return False
    steps = np.diff(grid)
    return bool(np.allclose(steps, steps[0], rtol=rtol, atol=0.0))


def is_valid_overlap(overlap: Any) -> bool:
    """
    Validate a Welch segment overlap fraction in [0, 0.9].

    Args:
        overlap: Overlap fraction

    Returns:
        True if valid, False otherwise
    """
    try:
        overlap = float(overlap)
    except (TypeError, ValueError):
        return False
    return 0.0 <= overlap <= 0.9


def require_positive(name: str, value: Any) -> float:
    """Return ``value`` as float or raise if it is not strictly positive."""
    if not is_valid_positive(value):
        raise ParameterError(f"{name} must be strictly positive and finite, got {value!r}")
    return float(value)


def require_non_negative(name: str, value: Any) -> float:
    """Return ``value`` as float or raise if it is negative."""
    if not is_valid_non_negative(value):
        raise ParameterError(f"{name} must be non-negative and finite, got {value!r}")
    return float(value)


def require_alpha(value: Any) -> float:
    """Return a springpot order or raise if it lies outside [0, 1]."""
    if not is_valid_alpha(value):
        raise ParameterError(f"springpot order alpha must lie in [0, 1], got {value!r}")
    return float(value)


def require_dimension(value: Any) -> int:
    """Return the number of dimensions or raise if it is not 1, 2 or 3."""
    if not is_valid_dimension(value):
        raise ParameterError(f"N must be one of 1, 2, 3, got {value!r}")
    return int(value)


def require_uniform(grid: Any) -> np.ndarray:
    """Return ``grid`` as an array or raise if it is not uniform."""
    if not is_uniform_grid(grid):
        raise GridError("grid must be ascending with constant spacing")
    return np.asarray(grid, dtype=float)
