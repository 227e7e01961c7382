"""
Matrix-valued curves t ↦ Θ(t) on [0, 1] with optional analytic derivatives.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.typing import ArrayLike

from tvglasso.core.exceptions import DimensionMismatch, MissingDerivatives
from tvglasso.models.matrices import SymmetricMatrix
from tvglasso.models.trajectory import GraphTrajectory

MatrixFunction = Callable[[float], np.ndarray]


def _symmetric(values: ArrayLike, name: str) -> np.ndarray:
    array = np.atleast_2d(np.asarray(values, dtype=np.float64))
    if array.shape[0] != array.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {array.shape}")
    return 0.5 * (array + array.T)


@dataclass(frozen=True)
class MatrixCurve:
    """
    Symmetric-matrix curve with optional first and second derivatives.

    The callables return plain p×p arrays; ``at``, ``derivative`` and
    ``second_derivative_at`` wrap them as SymmetricMatrix.
    """

    dim: int
    evaluator: MatrixFunction
    first_derivative: Optional[MatrixFunction] = None
    second_derivative: Optional[MatrixFunction] = None

    def at(self, t: float) -> SymmetricMatrix:
        return SymmetricMatrix(self.evaluator(t))

    def derivative(self, t: float) -> SymmetricMatrix:
        """Θ′(t)"""
        if self.first_derivative is None:
            raise MissingDerivatives("Curve has no analytic first derivative")
        return SymmetricMatrix(self.first_derivative(t))

    def second_derivative_at(self, t: float) -> SymmetricMatrix:
        """Θ″(t)"""
        if self.second_derivative is None:
            raise MissingDerivatives("Curve has no analytic second derivative")
        return SymmetricMatrix(self.second_derivative(t))

    @property
    def has_derivatives(self) -> bool:
        return self.first_derivative is not None and self.second_derivative is not None

    @classmethod
    def constant(cls, value: ArrayLike) -> "MatrixCurve":
        return cls.quadratic(value, np.zeros_like(_symmetric(value, "value")))

    @classmethod
    def affine(cls, base: ArrayLike, slope: ArrayLike) -> "MatrixCurve":
        """Θ(t) = B + t·A"""
        b = _symmetric(base, "base")
        return cls.quadratic(b, slope, np.zeros_like(b))

    @classmethod
    def quadratic(
        cls, base: ArrayLike, slope: ArrayLike, curvature: Optional[ArrayLike] = None
    ) -> "MatrixCurve":
        """Θ(t) = B + t·A + t²·C"""
        b = _symmetric(base, "base")
        a = _symmetric(slope, "slope")
        c = np.zeros_like(b) if curvature is None else _symmetric(curvature, "curvature")
        if not b.shape == a.shape == c.shape:
            raise DimensionMismatch(
                f"Coefficient shapes differ: {b.shape}, {a.shape}, {c.shape}"
            )
        return cls(
            dim=b.shape[0],
            evaluator=lambda t: b + t * a + t * t * c,
            first_derivative=lambda t: a + 2.0 * t * c,
            second_derivative=lambda t: 2.0 * c,
        )

    @classmethod
    def from_trajectory(cls, trajectory: GraphTrajectory) -> "MatrixCurve":
        """
        Piecewise-linear interpolation of a generated trajectory.

        The derivative is the slope of the segment starting at the last grid
        point at or before t; the second derivative vanishes off the grid.
        """
        times = trajectory.times
        p = trajectory.p

        def evaluate(t: float) -> np.ndarray:
            k = trajectory.step_index(t)
            if k >= trajectory.steps - 1:
                return trajectory.theta_array(k)
            fraction = (t - times[k]) / (times[k + 1] - times[k])
            return (1.0 - fraction) * trajectory.theta_array(k) + fraction * trajectory.theta_array(k + 1)

        return cls(
            dim=p,
            evaluator=evaluate,
            first_derivative=lambda t: trajectory.theta_derivative_array(trajectory.step_index(t)),
            second_derivative=lambda t: np.zeros((p, p)),
        )
