"""
Dense symmetric matrix types: the storage for Σ, Θ and Ŝ_n(t).

Instances are immutable: the wrapped array is a private symmetrized copy
marked read-only, so a matrix can be shared between threads freely.
"""

from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from tvglasso.core.config import settings
from tvglasso.core.exceptions import DimensionMismatch, NotPositiveDefinite


def _as_square_array(entries: ArrayLike) -> np.ndarray:
    array = np.array(entries, dtype=np.float64, copy=True)
    if array.ndim == 0:
        array = array.reshape(1, 1)
    if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] == 0:
        raise DimensionMismatch(f"Expected a non-empty square matrix, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ValueError("Matrix entries must be finite")
    return array


@dataclass(frozen=True, eq=False)
class SymmetricMatrix:
    """
    Dense p×p symmetric matrix of finite reals.

    Symmetry is enforced at construction by averaging (m + mᵀ)/2.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        array = _as_square_array(self.entries)
        array = 0.5 * (array + array.T)
        array.setflags(write=False)
        object.__setattr__(self, "entries", array)
        self._validate()

    def _validate(self) -> None:
        """Hook for subclasses adding cone constraints"""

    @property
    def dim(self) -> int:
        """Dimension p"""
        return int(self.entries.shape[0])

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.entries).copy()

    def to_array(self) -> np.ndarray:
        """Writable copy of the entries"""
        return self.entries.copy()

    def __array__(self, dtype: Any = None, copy: Any = None) -> np.ndarray:
        return self.entries.astype(dtype) if dtype is not None else self.entries

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymmetricMatrix):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.entries.tobytes()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"

    @classmethod
    def identity(cls, p: int) -> "SymmetricMatrix":
        return cls(np.eye(p))

    @classmethod
    def diag(cls, values: ArrayLike) -> "SymmetricMatrix":
        return cls(np.diag(np.asarray(values, dtype=np.float64)))


class CovarianceMatrix(SymmetricMatrix):
    """
    Positive semidefinite symmetric matrix (Σ(t), Ŝ_n(t)).

    Accepted when the smallest eigenvalue is at least
    −PSD_RELATIVE_TOL × (largest diagonal entry).
    """

    def _validate(self) -> None:
        scale = max(float(np.max(np.abs(np.diag(self.entries)))), 0.0)
        lam_min = float(np.linalg.eigvalsh(self.entries)[0])
        if lam_min < -settings.PSD_RELATIVE_TOL * scale:
            raise NotPositiveDefinite(
                f"Covariance matrix is not positive semidefinite (smallest eigenvalue {lam_min:.3e})"
            )


class PrecisionMatrix(SymmetricMatrix):
    """Strictly positive definite symmetric matrix (Θ(t) = Σ(t)⁻¹)."""

    def _validate(self) -> None:
        # deferred: linalg builds on these types
        from tvglasso.core.linalg import cholesky

        cholesky(self)
