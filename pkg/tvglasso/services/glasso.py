"""
Graphical lasso: the Lagrangian estimator

    Θ̂ = argmin_{Θ ≻ 0} { tr(ΘS) − log|Θ| + λ·pen(Θ) }

solved by block coordinate descent over the columns of the covariance
W = Θ⁻¹, each column update being a lasso problem solved by coordinate
descent. Convergence is certified by the KKT residual, not by parameter
change.

Penalizing the diagonal adds λ·Σθ_ii = tr(Θ·λI) for positive definite Θ,
so that case is solved as the off-diagonal problem on S + λI.
"""

from typing import List, Optional, Sequence

import numpy as np
from sklearn.linear_model import _cd_fast as cd_fast
from sklearn.utils import check_random_state

from tvglasso.core.config import settings
from tvglasso.core.exceptions import (
    MaxIterationsExceeded,
    NotPositiveDefinite,
    SingularInput,
    ZeroDiagonal,
)
from tvglasso.core.linalg import MatrixLike, as_array, log_det, spd_inverse_array
from tvglasso.core.logging import get_logger
from tvglasso.models.fit import GlassoFit
from tvglasso.models.graph import EdgeSet
from tvglasso.models.matrices import CovarianceMatrix, PrecisionMatrix
from tvglasso.schemas.penalty import PenaltySpec
from tvglasso.utils.metrics import (
    glasso_fits_total,
    glasso_iterations,
)

logger = get_logger(__name__)

# entries below this magnitude count as exact zeros in the KKT check
KKT_ZERO = 1e-12

# cyclic sweeps never draw from it
_CD_RNG = check_random_state(0)


# ==================== Objective & certificates ====================


def lambda_max(S: MatrixLike) -> float:
    """
    Screening threshold max_{i≠j} |s_ij|.

    For λ at or above it the off-diagonal-penalized solution is diagonal.
    """
    s = as_array(S)
    if s.shape[0] < 2:
        return 0.0
    off = np.abs(s - np.diag(np.diag(s)))
    return float(off.max())


def default_lambda_grid(S: MatrixLike, count: int = 20, ratio: float = 100.0) -> List[float]:
    """
    ``count`` log-spaced values from λ_max down to λ_max / ratio.

    Returned in decreasing order, ready for a warm-started path.
    """
    top = lambda_max(S)
    if top <= 0.0:
        raise ValueError("λ_max is zero: every off-diagonal entry of S vanishes")
    return [float(v) for v in np.geomspace(top, top / ratio, count)]


def penalized_l1(theta: MatrixLike, penalty: PenaltySpec) -> float:
    """ℓ1 norm of Θ over the penalized entries"""
    t = as_array(theta)
    return float(np.abs(t[penalty.mask(t.shape[0])]).sum())


def penalized_objective(S: MatrixLike, theta: MatrixLike, penalty: PenaltySpec) -> float:
    """
    tr(ΘS) − log|Θ| + λ·pen(Θ).

    Raises:
        NotPositiveDefinite: If theta is not positive definite
    """
    s = as_array(S)
    t = as_array(theta)
    return float(np.sum(t * s) - log_det(t) + penalty.lam * penalized_l1(t, penalty))


def _kkt_from_inverse(
    s: np.ndarray, t: np.ndarray, t_inv: np.ndarray, penalty: PenaltySpec
) -> float:
    gradient = s - t_inv
    penalized = penalty.mask(t.shape[0])
    nonzero = np.abs(t) >= KKT_ZERO

    residual = np.abs(gradient)
    shrunk = np.where(
        nonzero,
        np.abs(gradient + penalty.lam * np.sign(t)),
        np.maximum(0.0, np.abs(gradient) - penalty.lam),
    )
    residual = np.where(penalized, shrunk, residual)
    return float(residual.max())


def kkt_residual(S: MatrixLike, theta: MatrixLike, penalty: PenaltySpec) -> float:
    """
    Maximum violation of the first-order conditions at Θ.

    With G = S − Θ⁻¹: |G_ij + λ·sign(θ_ij)| for penalized nonzero entries,
    max(0, |G_ij| − λ) for penalized zero entries, |G_ij| for unpenalized
    entries.

    Raises:
        NotPositiveDefinite: If theta is not positive definite
    """
    s = as_array(S)
    t = as_array(theta)
    return _kkt_from_inverse(s, t, spd_inverse_array(t), penalty)


def edges_of(theta: MatrixLike, zero_tol: Optional[float] = None) -> EdgeSet:
    """
    Edge set of Θ: (i, j), i < j, with |θ_ij| > zero_tol.

    Args:
        theta: Precision matrix
        zero_tol: Threshold; defaults to ZERO_TOL × max |θ_ij|

    Returns:
        EdgeSet over Θ's dimension
    """
    t = as_array(theta)
    if zero_tol is None:
        zero_tol = default_zero_tol(t)
    if zero_tol < 0:
        raise ValueError("zero_tol must be nonnegative")
    rows, cols = np.nonzero(np.triu(np.abs(t) > zero_tol, k=1))
    return EdgeSet(t.shape[0], frozenset(zip(rows.tolist(), cols.tolist())))


def default_zero_tol(theta: MatrixLike) -> float:
    """ZERO_TOL scaled by the largest entry magnitude"""
    t = as_array(theta)
    return settings.ZERO_TOL * float(np.max(np.abs(t)))


# ==================== Solver ====================


def _lasso_cd(
    V: np.ndarray, u: np.ndarray, lam: float, beta: np.ndarray, tol: float, max_iter: int
) -> np.ndarray:
    """
    Coordinate descent for min_β ½βᵀVβ − uᵀβ + λ|β|₁ with V positive definite.

    Runs the compiled Gram-form solver of scikit-learn; ``tol`` is its duality
    gap relative to uᵀu.
    """
    if np.max(np.abs(u), initial=0.0) <= lam:
        # β = 0 satisfies the optimality conditions
        return np.zeros_like(beta)
    coefs, _, _, _ = cd_fast.enet_coordinate_descent_gram(
        np.array(beta, dtype=np.float64, order="C"),
        lam,
        0.0,
        np.ascontiguousarray(V, dtype=np.float64),
        np.ascontiguousarray(u, dtype=np.float64),
        np.ascontiguousarray(u, dtype=np.float64),
        max_iter,
        tol,
        _CD_RNG,
        False,
    )
    return np.asarray(coefs)


def _theta_from_columns(W: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Recover Θ from the covariance W and the column regressions B"""
    p = W.shape[0]
    theta = np.zeros((p, p))
    for j in range(p):
        idx = np.arange(p) != j
        beta = B[idx, j]
        theta_jj = 1.0 / (W[j, j] - W[idx, j] @ beta)
        theta[j, j] = theta_jj
        theta[idx, j] = -beta * theta_jj
    return 0.5 * (theta + theta.T)


def _initial_state(
    s_work: np.ndarray, warm_start: Optional[GlassoFit]
) -> tuple[np.ndarray, np.ndarray]:
    """Starting covariance W (diagonal pinned to s_work) and regressions B"""
    p = s_work.shape[0]
    if warm_start is not None and warm_start.theta.dim == p:
        W = warm_start.sigma.to_array()
        np.fill_diagonal(W, np.diag(s_work))
        # a shrinking diagonal penalty can push the pinned W out of the cone
        if np.linalg.eigvalsh(W)[0] > 0.0:
            prev = warm_start.theta.entries
            B = -prev / np.diag(prev)[None, :]
            np.fill_diagonal(B, 0.0)
            return W, B

    W = 0.95 * s_work + 0.05 * np.diag(np.diag(s_work))
    np.fill_diagonal(W, np.diag(s_work))
    return W, np.zeros((p, p))


def _validate_input(s: np.ndarray, penalty: PenaltySpec) -> None:
    diagonal = np.diag(s)
    if penalty.lam > 0.0 and not penalty.penalize_diagonal and np.any(diagonal <= 0.0):
        bad = int(np.flatnonzero(diagonal <= 0.0)[0])
        raise ZeroDiagonal(f"Diagonal entry S[{bad},{bad}] must be strictly positive")


def _unpenalized_fit(s: np.ndarray, penalty: PenaltySpec, tol: float) -> GlassoFit:
    try:
        theta = spd_inverse_array(s)
    except NotPositiveDefinite as e:
        raise SingularInput("λ = 0 requires a strictly positive definite S") from e

    residual = kkt_residual(s, theta, penalty)
    objective = penalized_objective(s, theta, penalty)
    return GlassoFit(
        theta=PrecisionMatrix(theta),
        sigma=CovarianceMatrix(s),
        penalty=penalty,
        iterations=0,
        kkt_residual=residual,
        objective=objective,
        tol=tol,
        converged=residual <= tol,
        objective_trace=(objective,),
    )


def fit(
    S: MatrixLike,
    penalty: PenaltySpec,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    warm_start: Optional[GlassoFit] = None,
    jitter: float = 0.0,
) -> GlassoFit:
    """
    Solve the graphical lasso for a covariance S.

    Args:
        S: Symmetric positive semidefinite covariance
        penalty: λ and penalty scope
        tol: KKT residual tolerance (defaults to settings.GLASSO_TOL)
        max_iter: Maximum block sweeps (defaults to settings.GLASSO_MAX_ITER)
        warm_start: Previous fit whose covariance and regressions seed the sweep
        jitter: Diagonal ridge added to S; a diagnostic, off by default

    Returns:
        Converged GlassoFit with kkt_residual ≤ tol

    Raises:
        SingularInput: λ = 0 with singular S
        ZeroDiagonal: Off-diagonal penalty with a nonpositive diagonal entry
        MaxIterationsExceeded: Cap reached; the best iterate is attached
    """
    tol = settings.GLASSO_TOL if tol is None else tol
    max_iter = settings.GLASSO_MAX_ITER if max_iter is None else max_iter

    s = CovarianceMatrix(as_array(S)).to_array()
    p = s.shape[0]
    if jitter > 0.0:
        s = s + jitter * np.eye(p)

    glasso_fits_total.labels(outcome="started").inc()

    if penalty.lam == 0.0:
        result = _unpenalized_fit(s, penalty, tol)
        glasso_fits_total.labels(outcome="converged").inc()
        return result

    _validate_input(s, penalty)

    # off-diagonal problem on the shifted covariance
    lam = penalty.lam
    s_work = s + lam * np.eye(p) if penalty.penalize_diagonal else s

    W, B = _initial_state(s_work, warm_start)

    trace: List[float] = []
    try:
        trace.append(penalized_objective(s, spd_inverse_array(W), penalty))
    except NotPositiveDefinite:
        pass

    best: Optional[GlassoFit] = None
    indices = np.arange(p)

    for iteration in range(1, max_iter + 1):
        if p > 1:
            for j in range(p):
                idx = indices != j
                V = W[np.ix_(idx, idx)]
                beta = _lasso_cd(
                    V,
                    s_work[idx, j],
                    lam,
                    B[idx, j],
                    settings.LASSO_TOL,
                    settings.LASSO_MAX_ITER,
                )
                B[idx, j] = beta
                column = V @ beta
                W[idx, j] = column
                W[j, idx] = column

        theta = _theta_from_columns(W, B)
        try:
            theta_inv = spd_inverse_array(theta)
        except NotPositiveDefinite:
            continue

        residual = _kkt_from_inverse(s, theta, theta_inv, penalty)
        objective = penalized_objective(s, theta, penalty)
        trace.append(objective)

        if best is None or residual < best.kkt_residual:
            best = GlassoFit(
                theta=PrecisionMatrix(theta),
                sigma=CovarianceMatrix(theta_inv),
                penalty=penalty,
                iterations=iteration,
                kkt_residual=residual,
                objective=objective,
                tol=tol,
                converged=residual <= tol,
                objective_trace=tuple(trace),
            )

        if residual <= tol:
            glasso_fits_total.labels(outcome="converged").inc()
            glasso_iterations.observe(iteration)
            logger.debug(
                "glasso_fit_converged",
                lam=lam,
                iterations=iteration,
                kkt_residual=residual,
                objective=objective,
            )
            return best

    glasso_fits_total.labels(outcome="max_iter").inc()
    logger.warning(
        "glasso_max_iterations_exceeded",
        lam=lam,
        max_iter=max_iter,
        kkt_residual=None if best is None else best.kkt_residual,
    )
    raise MaxIterationsExceeded(
        f"Graphical lasso did not reach KKT residual {tol:g} in {max_iter} sweeps",
        fit=None if best is None else _flag_unconverged(best),
    )


def _flag_unconverged(best: GlassoFit) -> GlassoFit:
    return GlassoFit(
        theta=best.theta,
        sigma=best.sigma,
        penalty=best.penalty,
        iterations=best.iterations,
        kkt_residual=best.kkt_residual,
        objective=best.objective,
        tol=best.tol,
        converged=False,
        objective_trace=best.objective_trace,
    )


def regularization_path(
    S: MatrixLike,
    lambdas: Sequence[float],
    penalize_diagonal: bool = False,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> List[GlassoFit]:
    """
    Warm-started fits along a strictly decreasing λ grid.

    Args:
        S: Covariance
        lambdas: Strictly decreasing positive penalties
        penalize_diagonal: Penalty scope for every fit
        tol: KKT tolerance
        max_iter: Sweep cap per fit

    Returns:
        One GlassoFit per λ, in the order given

    Raises:
        ValueError: If the grid is not strictly decreasing and positive
    """
    grid = [float(v) for v in lambdas]
    if not grid:
        raise ValueError("λ grid is empty")
    if any(v <= 0.0 for v in grid):
        raise ValueError("λ grid must be positive")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("λ grid must be strictly decreasing")

    fits: List[GlassoFit] = []
    previous: Optional[GlassoFit] = None
    for lam in grid:
        penalty = PenaltySpec(lam=lam, penalize_diagonal=penalize_diagonal)
        previous = fit(S, penalty, tol=tol, max_iter=max_iter, warm_start=previous)
        fits.append(previous)

    logger.info(
        "regularization_path_completed",
        points=len(fits),
        lambda_max=grid[0],
        lambda_min=grid[-1],
        edge_counts=[len(edges_of(f.theta)) for f in fits],
    )
    return fits
