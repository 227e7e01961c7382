"""
Kernel weights and the kernel-smoothed covariance estimator

    Ŝ_n(t) = Σ_s w_st Z_s Z_sᵀ / Σ_s w_st,   w_st = K(|s − t| / h).

The data are taken to be zero-mean, so no centering is applied.
"""

from typing import Union

import numpy as np
from numpy.typing import ArrayLike

from tvglasso.core.exceptions import EmptyWindow
from tvglasso.core.logging import get_logger
from tvglasso.models.matrices import CovarianceMatrix
from tvglasso.models.series import TimeSeriesData
from tvglasso.schemas.kernel import KernelFamily, KernelSpec

logger = get_logger(__name__)

REFERENCE_BANDWIDTH_SCALE = 5.848


def kernel_values(family: KernelFamily, v: ArrayLike) -> np.ndarray:
    """
    Vectorized kernel evaluation; zero outside [-1, 1].

    Args:
        family: Kernel family
        v: Scaled distances

    Returns:
        Nonnegative kernel values with the shape of ``v``
    """
    v = np.asarray(v, dtype=np.float64)
    inside = np.abs(v) <= 1.0

    if family == KernelFamily.BOXCAR:
        values = np.full(v.shape, 0.5)
    elif family == KernelFamily.EPANECHNIKOV:
        values = 0.75 * (1.0 - v**2)
    elif family == KernelFamily.TRUNCATED_GAUSSIAN:
        values = np.exp(-0.5 * v**2)
    else:  # pragma: no cover - enum is exhaustive
        raise ValueError(f"Unknown kernel family: {family}")

    return np.where(inside, values, 0.0)


def kernel_value(spec: KernelSpec, v: float) -> float:
    """
    K(v) for the given family.

    boxcar: 1/2, epanechnikov: (3/4)(1 − v²), truncated_gaussian: exp(−v²/2),
    each on [-1, 1] and 0 outside.
    """
    return float(kernel_values(spec.family, v))


def smoothing_weights(spec: KernelSpec, times: ArrayLike, t0: float) -> np.ndarray:
    """
    Normalized smoothing weights w_k ∝ K((times[k] − t0) / h).

    Args:
        spec: Kernel family and bandwidth
        times: Observation times
        t0: Point of estimation in [0, 1]

    Returns:
        Nonnegative weights summing to one

    Raises:
        EmptyWindow: If every raw weight is zero
    """
    times = np.asarray(times, dtype=np.float64).reshape(-1)
    if times.size == 0:
        raise EmptyWindow("No observation times supplied")

    raw = kernel_values(spec.family, (times - t0) / spec.bandwidth)
    total = float(raw.sum())
    if total <= 0.0:
        raise EmptyWindow(
            f"No observation within bandwidth {spec.bandwidth} of t0={t0}"
        )
    return raw / total


def reference_bandwidth(
    n: int, scale: float = REFERENCE_BANDWIDTH_SCALE, exponent: float = 1.0 / 3.0
) -> float:
    """
    Bandwidth rule h = scale / n^exponent, capped at 1.

    With the default scale, n = 200 gives h ≈ 1.
    """
    if n < 1:
        raise ValueError("n must be positive")
    return float(min(1.0, scale / n**exponent))


def weighted_second_moment(observations: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Σ_k w_k Z_k Z_kᵀ over rows with nonzero weight"""
    active = weights > 0.0
    z = observations[active]
    w = weights[active]
    moment = (z * w[:, None]).T @ z
    return 0.5 * (moment + moment.T)


def smoothed_covariance(
    data: TimeSeriesData, t0: float, spec: KernelSpec
) -> CovarianceMatrix:
    """
    Kernel-smoothed covariance Ŝ_n(t0).

    Args:
        data: Observations with time grid
        t0: Point of estimation
        spec: Kernel family and bandwidth

    Returns:
        Ŝ_n(t0) as a CovarianceMatrix

    Raises:
        EmptyWindow: If no observation falls inside the kernel window
    """
    weights = smoothing_weights(spec, data.times, t0)
    s_hat = CovarianceMatrix(weighted_second_moment(data.observations, weights))

    logger.debug(
        "smoothed_covariance_computed",
        t0=t0,
        family=spec.family.value,
        bandwidth=spec.bandwidth,
        window=int(np.count_nonzero(weights)),
    )
    return s_hat


def second_moment(data: Union[TimeSeriesData, np.ndarray]) -> CovarianceMatrix:
    """Unweighted (1/n)·Σ_k Z_k Z_kᵀ, the iid estimator"""
    observations = data.observations if isinstance(data, TimeSeriesData) else np.asarray(data)
    n = observations.shape[0]
    return CovarianceMatrix(weighted_second_moment(observations, np.full(n, 1.0 / n)))
