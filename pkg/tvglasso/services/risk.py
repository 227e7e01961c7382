"""
Evaluation functionals for fitted precision matrices: predictive and
empirical risk, graph loss, precision/recall and the oracle estimator.

    R(Σ)  = tr(Σ⁻¹Σ₀) + log|Σ|        (expected negative log-likelihood)
    R̂(Σ) = tr(Σ⁻¹Ŝ) + log|Σ|
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from tvglasso.core.exceptions import DimensionMismatch
from tvglasso.core.linalg import MatrixLike, as_array, log_det, spd_inverse_array
from tvglasso.core.logging import get_logger
from tvglasso.models.fit import GlassoFit
from tvglasso.models.graph import EdgeSet
from tvglasso.schemas.penalty import PenaltySpec
from tvglasso.schemas.report import RiskReport
from tvglasso.services import glasso

logger = get_logger(__name__)

MATCH_RELATIVE_TOL = 0.05


def _risk(sigma: MatrixLike, reference: MatrixLike) -> float:
    sigma_arr = as_array(sigma)
    reference_arr = as_array(reference)
    if sigma_arr.shape != reference_arr.shape:
        raise DimensionMismatch(
            f"Risk of a {sigma_arr.shape} matrix against a {reference_arr.shape} reference"
        )
    inverse = spd_inverse_array(sigma_arr)
    return float(np.sum(inverse * reference_arr) + log_det(sigma_arr))


def predictive_risk(sigma: MatrixLike, sigma0: MatrixLike) -> float:
    """
    R(Σ) = tr(Σ⁻¹Σ₀) + log|Σ|.

    Args:
        sigma: Candidate covariance, strictly positive definite
        sigma0: True covariance

    Returns:
        Predictive risk (up to an additive constant)

    Raises:
        NotPositiveDefinite: If sigma is not positive definite
    """
    return _risk(sigma, sigma0)


def empirical_risk(sigma: MatrixLike, s_hat: MatrixLike) -> float:
    """R̂(Σ) = tr(Σ⁻¹Ŝ) + log|Σ|"""
    return _risk(sigma, s_hat)


def graph_loss(f_true: EdgeSet, f_est: EdgeSet) -> int:
    """
    Symmetric-difference loss |F Δ F̂| over unordered pairs.

    Raises:
        DimensionMismatch: If the edge sets have different dimensions
    """
    return len(f_true ^ f_est)


def precision_recall(
    f_true: EdgeSet, f_est: EdgeSet
) -> Tuple[Optional[float], Optional[float]]:
    """
    Precision |F̂∩F|/|F̂| and recall |F̂∩F|/|F|.

    Returns:
        (precision, recall); precision is None for empty F̂, recall is None
        for empty F

    Raises:
        DimensionMismatch: If the edge sets have different dimensions
    """
    hits = len(f_true & f_est)
    precision = hits / len(f_est) if len(f_est) else None
    recall = hits / len(f_true) if len(f_true) else None
    return precision, recall


def oracle_fit(
    sigma0: MatrixLike, penalty: PenaltySpec, tol: Optional[float] = None
) -> GlassoFit:
    """
    Graphical lasso run on the true covariance Σ₀(t) in place of Ŝ.

    Errors propagate from the solver.
    """
    return glasso.fit(sigma0, penalty, tol=tol)


def frobenius_error(theta_hat: MatrixLike, theta_true: MatrixLike) -> float:
    """‖Θ̂ − Θ‖_F"""
    a = as_array(theta_hat)
    b = as_array(theta_true)
    if a.shape != b.shape:
        raise DimensionMismatch(f"Cannot compare {a.shape} with {b.shape}")
    return float(np.linalg.norm(a - b, ord="fro"))


def _relative_distance(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


def match_by_l1(
    oracle_fits: Sequence[GlassoFit],
    empirical_fits: Sequence[GlassoFit],
    rel_tol: float = MATCH_RELATIVE_TOL,
) -> List[Tuple[GlassoFit, GlassoFit]]:
    """
    Pair each empirical fit with the oracle fit of nearest penalized ℓ1 norm.

    Pairs further apart than ``rel_tol`` (relative to the larger norm) are
    dropped.

    Args:
        oracle_fits: Fits on the true covariance
        empirical_fits: Fits on the smoothed covariance
        rel_tol: Maximum relative ℓ1 distance for a match

    Returns:
        List of (oracle, empirical) pairs in empirical-fit order
    """
    if not oracle_fits:
        return []

    oracle_norms = np.array([glasso.penalized_l1(f.theta, f.penalty) for f in oracle_fits])
    pairs: List[Tuple[GlassoFit, GlassoFit]] = []
    for empirical in empirical_fits:
        norm = glasso.penalized_l1(empirical.theta, empirical.penalty)
        nearest = int(np.argmin(np.abs(oracle_norms - norm)))
        if _relative_distance(float(oracle_norms[nearest]), norm) <= rel_tol:
            pairs.append((oracle_fits[nearest], empirical))

    logger.debug("l1_matching_completed", empirical=len(empirical_fits), matched=len(pairs))
    return pairs


def risk_report(
    fit: GlassoFit,
    s_hat: MatrixLike,
    sigma0: Optional[MatrixLike] = None,
    f_true: Optional[EdgeSet] = None,
    zero_tol: Optional[float] = None,
    oracle: Optional[GlassoFit] = None,
) -> RiskReport:
    """
    Assemble the evaluation row for one fit.

    Args:
        fit: Fit on the smoothed covariance
        s_hat: The smoothed covariance the fit was computed on
        sigma0: True covariance; enables the predictive risk
        f_true: True edge set; enables precision, recall and graph loss
        zero_tol: Edge threshold for the estimated graph
        oracle: Oracle fit at the same λ; fills the oracle columns

    Returns:
        RiskReport
    """
    f_est = glasso.edges_of(fit.theta, zero_tol)

    precision: Optional[float] = None
    recall: Optional[float] = None
    loss: Optional[int] = None
    if f_true is not None:
        precision, recall = precision_recall(f_true, f_est)
        loss = graph_loss(f_true, f_est)

    report = RiskReport(
        lam=fit.lam,
        l1_norm=glasso.penalized_l1(fit.theta, fit.penalty),
        edge_count=len(f_est),
        precision=precision,
        recall=recall,
        predictive_risk=None if sigma0 is None else predictive_risk(fit.sigma, sigma0),
        empirical_risk=empirical_risk(fit.sigma, s_hat),
        graph_loss=loss,
    )

    if oracle is not None and sigma0 is not None:
        report = report.model_copy(
            update={
                "oracle_l1_norm": glasso.penalized_l1(oracle.theta, oracle.penalty),
                "oracle_edge_count": len(glasso.edges_of(oracle.theta, zero_tol)),
                "oracle_predictive_risk": predictive_risk(oracle.sigma, sigma0),
            }
        )
    return report
