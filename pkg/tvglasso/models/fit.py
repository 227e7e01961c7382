"""
Result of an ℓ1-penalized log-determinant fit.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

from tvglasso.models.matrices import CovarianceMatrix, PrecisionMatrix
from tvglasso.schemas.penalty import PenaltySpec


@dataclass(frozen=True)
class GlassoFit:
    """
    Estimated precision Θ̂, implied covariance Σ̂ = Θ̂⁻¹ and diagnostics.

    ``converged`` is False only for the best iterate attached to a
    MaxIterationsExceeded error.
    """

    theta: PrecisionMatrix
    sigma: CovarianceMatrix
    penalty: PenaltySpec
    iterations: int
    kkt_residual: float
    objective: float
    tol: float
    converged: bool = True
    objective_trace: Tuple[float, ...] = field(default=(), repr=False)

    @property
    def lam(self) -> float:
        return self.penalty.lam

    def meta(self) -> Dict[str, Any]:
        """Solver diagnostics for serialization"""
        return {
            "lambda": self.penalty.lam,
            "penalize_diagonal": self.penalty.penalize_diagonal,
            "iterations": self.iterations,
            "kkt_residual": self.kkt_residual,
            "objective": self.objective,
            "tol": self.tol,
            "converged": self.converged,
        }
