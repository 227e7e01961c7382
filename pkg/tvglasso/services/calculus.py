"""
Derivatives of Σ(t) = Θ(t)⁻¹ from derivatives of Θ(t):

    Σ′ = −Σ·Θ′·Σ
    Σ″ =  Σ·(2·Θ′·Σ·Θ′ − Θ″)·Σ

and the smoothness budget bounding them, with S0 ≥ max_i σ_ii(t),
√S1 ≥ Σ_kℓ |θ′_kℓ(t)| and S2 ≥ Σ_kℓ |θ″_kℓ(t)|:

    |σ′_ij| ≤ S0²·√S1,    |σ″_ij| ≤ 2·S0³·S1 + S0²·S2.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from tvglasso.core.exceptions import DimensionMismatch, MissingDerivatives
from tvglasso.core.linalg import MatrixLike, as_array, spd_inverse_array
from tvglasso.core.logging import get_logger
from tvglasso.models.curve import MatrixCurve
from tvglasso.models.matrices import SymmetricMatrix
from tvglasso.schemas.report import SmoothnessReport
from tvglasso.utils.parallel import ordered_map

logger = get_logger(__name__)

FIRST_DIFFERENCE_STEP = 1e-5
SECOND_DIFFERENCE_STEP = 1e-4
QUADRUPLE_SUM_MAX_DIM = 10


def _same_shape(*arrays: np.ndarray) -> None:
    shapes = {a.shape for a in arrays}
    if len(shapes) != 1:
        raise DimensionMismatch(f"Operands have different shapes: {sorted(shapes)}")


def _sigma_dot_array(sigma: np.ndarray, theta_dot: np.ndarray) -> np.ndarray:
    value = -sigma @ theta_dot @ sigma
    return 0.5 * (value + value.T)


def _sigma_ddot_array(sigma: np.ndarray, theta_dot: np.ndarray, theta_ddot: np.ndarray) -> np.ndarray:
    inner = 2.0 * theta_dot @ sigma @ theta_dot - theta_ddot
    value = sigma @ inner @ sigma
    return 0.5 * (value + value.T)


def sigma_dot(sigma: MatrixLike, theta_dot: MatrixLike) -> SymmetricMatrix:
    """
    dΣ/dt = −Σ·Θ′·Σ.

    Args:
        sigma: Σ(t), positive definite
        theta_dot: Θ′(t)

    Returns:
        Σ′(t)

    Raises:
        DimensionMismatch: If the shapes differ
    """
    s, d = as_array(sigma), as_array(theta_dot)
    _same_shape(s, d)
    return SymmetricMatrix(_sigma_dot_array(s, d))


def sigma_ddot(sigma: MatrixLike, theta_dot: MatrixLike, theta_ddot: MatrixLike) -> SymmetricMatrix:
    """
    d²Σ/dt² = Σ·D·Σ with D = 2·Θ′·Σ·Θ′ − Θ″.

    Raises:
        DimensionMismatch: If the shapes differ
    """
    s, d1, d2 = as_array(sigma), as_array(theta_dot), as_array(theta_ddot)
    _same_shape(s, d1, d2)
    return SymmetricMatrix(_sigma_ddot_array(s, d1, d2))


def covariance_at(curve: MatrixCurve, t: float) -> np.ndarray:
    """Σ(t) = Θ(t)⁻¹ for a precision curve"""
    return spd_inverse_array(curve.evaluator(t))


def finite_difference(curve: MatrixCurve, t: float, order: int = 1, step: Optional[float] = None) -> np.ndarray:
    """
    Central difference of Σ(t) = Θ(t)⁻¹.

    order 1: (Σ(t+δ) − Σ(t−δ)) / 2δ with δ = 1e-5;
    order 2: (Σ(t+δ) − 2Σ(t) + Σ(t−δ)) / δ² with δ = 1e-4.
    """
    if order == 1:
        delta = FIRST_DIFFERENCE_STEP if step is None else step
        return (covariance_at(curve, t + delta) - covariance_at(curve, t - delta)) / (2.0 * delta)
    if order == 2:
        delta = SECOND_DIFFERENCE_STEP if step is None else step
        return (
            covariance_at(curve, t + delta) - 2.0 * covariance_at(curve, t) + covariance_at(curve, t - delta)
        ) / delta**2
    raise ValueError(f"Unsupported difference order: {order}")


@dataclass(frozen=True)
class _PointBudget:
    max_variance: float
    abs_sum_first: float
    quadruple_first: Optional[float]
    abs_sum_second: float
    max_sigma_dot: float
    max_sigma_ddot: float


def _quadruple_sum(theta_dot: np.ndarray) -> float:
    """Σ_{k,ℓ,i,j} |θ′_ki·θ′_ℓj|"""
    magnitude = np.abs(theta_dot)
    return float(np.einsum("ki,lj->", magnitude, magnitude))


def _point_budget(curve: MatrixCurve, t: float) -> _PointBudget:
    sigma = covariance_at(curve, t)
    theta_dot = np.asarray(curve.first_derivative(t), dtype=np.float64)  # type: ignore[misc]
    theta_ddot = np.asarray(curve.second_derivative(t), dtype=np.float64)  # type: ignore[misc]
    return _PointBudget(
        max_variance=float(np.max(np.diag(sigma))),
        abs_sum_first=float(np.abs(theta_dot).sum()),
        quadruple_first=_quadruple_sum(theta_dot) if curve.dim <= QUADRUPLE_SUM_MAX_DIM else None,
        abs_sum_second=float(np.abs(theta_ddot).sum()),
        max_sigma_dot=float(np.max(np.abs(_sigma_dot_array(sigma, theta_dot)))),
        max_sigma_ddot=float(np.max(np.abs(_sigma_ddot_array(sigma, theta_dot, theta_ddot)))),
    )


def smoothness_budget(
    curve: MatrixCurve, grid: Sequence[float], threads: Optional[int] = None
) -> SmoothnessReport:
    """
    Grid suprema of |σ′_ij| and |σ″_ij| against their analytic bounds.

    Args:
        curve: Precision curve with analytic first and second derivatives
        grid: Evaluation points in [0, 1]
        threads: Worker cap for the per-point evaluation

    Returns:
        SmoothnessReport; the bounds use the grid suprema of S0, S1, S2

    Raises:
        MissingDerivatives: If either analytic derivative is absent
    """
    if not curve.has_derivatives:
        raise MissingDerivatives("smoothness_budget needs analytic Θ′ and Θ″")
    points = [float(t) for t in grid]
    if not points:
        raise ValueError("Evaluation grid is empty")

    budgets = ordered_map(lambda t: _point_budget(curve, t), points, threads)

    s0 = max(b.max_variance for b in budgets)
    s1 = max(b.abs_sum_first for b in budgets) ** 2
    quadruples = [b.quadruple_first for b in budgets if b.quadruple_first is not None]
    s1_quadruple = max(quadruples) if len(quadruples) == len(budgets) else None
    s2 = max(b.abs_sum_second for b in budgets)
    sup_dot = max(b.max_sigma_dot for b in budgets)
    sup_ddot = max(b.max_sigma_ddot for b in budgets)

    bound_first = s0**2 * np.sqrt(s1)
    bound_second = 2.0 * s0**3 * s1 + s0**2 * s2

    # relative slack for rounding in the matrix products
    slack = 1e-9
    report = SmoothnessReport(
        grid_points=len(points),
        s0=s0,
        s1=s1,
        s1_quadruple=s1_quadruple,
        s2=s2,
        sup_sigma_dot=sup_dot,
        sup_sigma_ddot=sup_ddot,
        bound_first=float(bound_first),
        bound_second=float(bound_second),
        first_bound_holds=bool(sup_dot <= bound_first * (1.0 + slack) + slack),
        second_bound_holds=bool(sup_ddot <= bound_second * (1.0 + slack) + slack),
    )

    if not (report.first_bound_holds and report.second_bound_holds):
        logger.error(
            "smoothness_bound_violated",
            sup_sigma_dot=sup_dot,
            bound_first=report.bound_first,
            sup_sigma_ddot=sup_ddot,
            bound_second=report.bound_second,
        )
    else:
        logger.info("smoothness_budget_computed", grid_points=len(points), s0=s0, s1=s1, s2=s2)
    return report
