"""
Validators shared by schemas and domain types.
"""

from typing import Optional, Sequence

import numpy as np


def validate_strictly_increasing(values: Sequence[float], min_length: int = 1) -> bool:
    """
    Validate a strictly increasing sequence.

    Args:
        values: Sequence to check
        min_length: Minimum number of values

    Returns:
        True if valid, False otherwise
    """
    if len(values) < min_length:
        return False
    return all(b > a for a, b in zip(values, values[1:]))


def validate_time_grid(times: Sequence[float]) -> bool:
    """
    Validate a time grid: finite, inside [0, 1] and strictly increasing.

    Args:
        times: Time stamps

    Returns:
        True if valid, False otherwise
    """
    grid = np.asarray(times, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(grid)):
        return False
    if np.any(grid < 0.0) or np.any(grid > 1.0):
        return False
    return bool(np.all(np.diff(grid) > 0.0))


def validate_square(rows: Sequence[Sequence[float]], dim: Optional[int] = None) -> bool:
    """
    Validate a nested-list matrix.

    Args:
        rows: Matrix as a list of rows
        dim: Required size (any size when None)

    Returns:
        True if rows form a non-empty square matrix of the required size
    """
    size = len(rows)
    if size == 0 or (dim is not None and size != dim):
        return False
    return all(len(row) == size for row in rows)


def validate_penalty_grid(lambdas: Sequence[float]) -> bool:
    """
    Validate a user-supplied λ grid: non-empty, positive, finite and distinct.

    Order is free; paths sort it.
    """
    if not lambdas:
        return False
    if any(not np.isfinite(lam) or lam <= 0.0 for lam in lambdas):
        return False
    return len(set(lambdas)) == len(lambdas)
