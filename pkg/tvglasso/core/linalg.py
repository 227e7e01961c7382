"""
Dense linear-algebra primitives consumed by every numerical module:
Cholesky factorization, log-determinant, SPD inverse, eigenvalue extremes.

All functions are pure and accept either a SymmetricMatrix (or subclass)
or a square array-like.
"""

from typing import TYPE_CHECKING, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg

from tvglasso.core.config import settings
from tvglasso.core.exceptions import DimensionMismatch, NotPositiveDefinite

if TYPE_CHECKING:
    from tvglasso.models.matrices import CovarianceMatrix, SymmetricMatrix

MatrixLike = Union["SymmetricMatrix", ArrayLike]


def as_array(m: MatrixLike) -> np.ndarray:
    """
    Square float64 view of a matrix argument.

    Args:
        m: SymmetricMatrix or square array-like

    Returns:
        2-D float array

    Raises:
        DimensionMismatch: If the argument is not square
    """
    entries = getattr(m, "entries", m)
    array = np.asarray(entries, dtype=np.float64)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise DimensionMismatch(f"Expected a square matrix, got shape {array.shape}")
    return array


def _pd_threshold(array: np.ndarray) -> float:
    scale = float(np.max(np.abs(np.diag(array)))) if array.size else 0.0
    return settings.CHOLESKY_TOL * scale


def cholesky(m: MatrixLike) -> np.ndarray:
    """
    Lower-triangular Cholesky factor L with L·Lᵀ = m.

    The factorization is refused when the smallest eigenvalue falls below
    CHOLESKY_TOL × (largest absolute diagonal entry).

    Args:
        m: Symmetric matrix

    Returns:
        Lower-triangular factor

    Raises:
        NotPositiveDefinite: If m is not positive definite within tolerance
    """
    array = as_array(m)
    if not np.all(np.isfinite(array)):
        raise NotPositiveDefinite("Matrix has non-finite entries")

    lam_min = float(linalg.eigvalsh(array, subset_by_index=[0, 0])[0])
    if lam_min <= 0.0 or lam_min < _pd_threshold(array):
        raise NotPositiveDefinite(
            f"Matrix is not positive definite (smallest eigenvalue {lam_min:.3e})"
        )

    try:
        return linalg.cholesky(array, lower=True, check_finite=False)
    except linalg.LinAlgError as e:
        raise NotPositiveDefinite(f"Cholesky factorization failed: {e}") from e


def log_det(m: MatrixLike) -> float:
    """
    log|m| = 2·Σᵢ log(L_ii) from the Cholesky factor.

    Raises:
        NotPositiveDefinite: If m is not positive definite
    """
    factor = cholesky(m)
    return float(2.0 * np.sum(np.log(np.diag(factor))))


def spd_inverse(m: MatrixLike) -> "CovarianceMatrix":
    """
    Inverse of a positive definite matrix, symmetrized after the solve.

    Args:
        m: Positive definite matrix (typically a PrecisionMatrix)

    Returns:
        The inverse as a CovarianceMatrix

    Raises:
        NotPositiveDefinite: If m is not positive definite
    """
    from tvglasso.models.matrices import CovarianceMatrix

    return CovarianceMatrix(spd_inverse_array(m))


def spd_inverse_array(m: MatrixLike) -> np.ndarray:
    """Array-level spd_inverse for solver inner loops"""
    factor = cholesky(m)
    p = factor.shape[0]
    inverse = linalg.cho_solve((factor, True), np.eye(p), check_finite=False)
    return 0.5 * (inverse + inverse.T)


def eigen_extremes(m: MatrixLike) -> Tuple[float, float]:
    """
    Smallest and largest eigenvalues (φ_min, φ_max).

    Raises:
        ValueError: On non-finite input
    """
    array = as_array(m)
    if not np.all(np.isfinite(array)):
        raise ValueError("Matrix has non-finite entries")
    eigenvalues = linalg.eigvalsh(0.5 * (array + array.T))
    return float(eigenvalues[0]), float(eigenvalues[-1])
