"""
Verification laboratory for the smoothed covariance estimator.

Closed-form moment generating functions of Gaussian products, the
deterministic bias of the kernel smoother, Monte-Carlo tail probabilities
of one smoothed entry against exponential envelopes, and the n-grid
experiments for the Frobenius rate and the max-entry consistency of Ŝ_n(t0).

Covariance curves given to ``bias_curve`` and ``tail_probability`` are
curves of Σ(t) itself.
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize, stats

from tvglasso.core.config import settings
from tvglasso.core.exceptions import OutOfDomain
from tvglasso.core.linalg import cholesky
from tvglasso.core.logging import get_logger
from tvglasso.models.curve import MatrixCurve
from tvglasso.models.series import default_times
from tvglasso.schemas.experiment import (
    BiasConfig,
    BiasRow,
    ConsistencyConfig,
    ConsistencyRow,
    MgfConfig,
    MgfRow,
    RateExperimentConfig,
    RateRow,
    TailEnvelope,
    TailExperimentConfig,
    TailGridConfig,
    TailRow,
)
from tvglasso.schemas.kernel import KernelFamily, KernelSpec
from tvglasso.schemas.penalty import PenaltySpec
from tvglasso.services import glasso, kernel, risk, simgen
from tvglasso.utils.metrics import mc_replicates_total
from tvglasso.utils.parallel import ordered_map

logger = get_logger(__name__)


def _children(seed: int, count: int) -> List[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(count)


# ==================== Moment generating functions ====================


def _mgf_factors(t: float, sigma_i: float, sigma_j: float, rho: float) -> Tuple[float, float]:
    if sigma_i <= 0.0 or sigma_j <= 0.0:
        raise ValueError("Standard deviations must be positive")
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"Correlation must lie in [-1, 1], got {rho}")
    scale = sigma_i * sigma_j
    covariance = rho * scale
    return 1.0 - t * (scale + covariance), 1.0 + t * (scale - covariance)


def mgf_product_normals(t: float, sigma_i: float, sigma_j: float, rho: float) -> float:
    """
    E exp(t·Z_i·Z_j) for a centered Gaussian pair.

    [(1 − t(σ_iσ_j + σ_ij))·(1 + t(σ_iσ_j − σ_ij))]^(−1/2) with σ_ij = ρσ_iσ_j.

    Args:
        t: Argument
        sigma_i: Standard deviation of Z_i
        sigma_j: Standard deviation of Z_j
        rho: Correlation

    Returns:
        MGF value

    Raises:
        OutOfDomain: If t is at or beyond a singularity
    """
    first, second = _mgf_factors(t, sigma_i, sigma_j, rho)
    if first <= 0.0 or second <= 0.0:
        raise OutOfDomain(
            f"t={t} outside the domain of the product MGF (σ_i={sigma_i}, σ_j={sigma_j}, ρ={rho})"
        )
    return float((first * second) ** -0.5)


def mgf_squared_normal(t: float, sigma: float) -> float:
    """
    E exp(t·Z²) = (1 − 2tσ²)^(−1/2) for Z ~ N(0, σ²).

    Raises:
        OutOfDomain: If 2tσ² ≥ 1
    """
    return mgf_product_normals(t, sigma, sigma, 1.0)


def monte_carlo_mgf(
    t: float, sigma_i: float, sigma_j: float, rho: float, draws: int, seed: int = 0
) -> Tuple[float, float]:
    """
    Sample mean and standard error of exp(t·Z_i·Z_j).

    Draws are taken in MC_BATCH_SIZE-sized batches, each from its own
    substream.
    """
    if draws < 2:
        raise ValueError("At least two draws are needed for a standard error")
    batch = settings.MC_BATCH_SIZE
    sizes = [min(batch, draws - start) for start in range(0, draws, batch)]
    covariance = np.array(
        [[sigma_i**2, rho * sigma_i * sigma_j], [rho * sigma_i * sigma_j, sigma_j**2]]
    )

    total = 0.0
    total_sq = 0.0
    for size, child in zip(sizes, _children(seed, len(sizes))):
        rng = np.random.default_rng(child)
        pairs = rng.multivariate_normal(np.zeros(2), covariance, size=size, method="eigh")
        values = np.exp(t * pairs[:, 0] * pairs[:, 1])
        total += float(values.sum())
        total_sq += float((values**2).sum())

    mc_replicates_total.labels(experiment="mgf").inc(draws)
    mean = total / draws
    variance = max(total_sq / draws - mean**2, 0.0) * draws / (draws - 1)
    return mean, math.sqrt(variance / draws)


def mgf_table(config: MgfConfig) -> List[MgfRow]:
    """Closed form over config.t_values, with Monte-Carlo columns when draws > 0"""
    rows = []
    for index, t in enumerate(config.t_values):
        row = MgfRow(t=t, mgf=mgf_product_normals(t, config.sigma_i, config.sigma_j, config.rho))
        if config.draws:
            mean, stderr = monte_carlo_mgf(
                t, config.sigma_i, config.sigma_j, config.rho, config.draws, config.seed + index
            )
            row = row.model_copy(update={"monte_carlo_mean": mean, "monte_carlo_stderr": stderr})
        rows.append(row)
    return rows


# ==================== Bias ====================


def _entry_values(curve: MatrixCurve, times: np.ndarray, entry: Tuple[int, int]) -> np.ndarray:
    i, j = entry
    return np.array([curve.evaluator(float(t))[i, j] for t in times])


def bias_curve(
    curve: MatrixCurve,
    entry: Tuple[int, int],
    t0: float,
    family: KernelFamily,
    h_values: Sequence[float],
    n: int,
) -> List[BiasRow]:
    """
    Deterministic bias Σ_k w_k σ_ij(t_k) − σ_ij(t0) per bandwidth.

    Args:
        curve: Covariance curve Σ(t)
        entry: (i, j)
        t0: Point of estimation
        family: Kernel family
        h_values: Bandwidths
        n: Grid size, t_k = k/(n−1)

    Returns:
        One BiasRow per bandwidth with |bias| and the signed bias

    Raises:
        EmptyWindow: If a bandwidth leaves no grid point in the window
    """
    times = default_times(n)
    values = _entry_values(curve, times, entry)
    target = float(curve.evaluator(t0)[entry[0], entry[1]])

    rows = []
    for h in h_values:
        weights = kernel.smoothing_weights(KernelSpec(family=family, bandwidth=h), times, t0)
        signed = float(weights @ values) - target
        rows.append(BiasRow(h=h, bias=abs(signed), signed_bias=signed))
    logger.info("bias_curve_computed", t0=t0, family=family.value, points=len(rows))
    return rows


def bias_experiment(config: BiasConfig) -> List[BiasRow]:
    return bias_curve(
        config.curve.build(), config.entry, config.t0, config.family, config.h_values, config.n
    )


def bias_ratios(rows: Sequence[BiasRow]) -> List[Optional[float]]:
    """Successive |bias| ratios; None where the previous bias is zero"""
    return [
        None if prev.bias == 0.0 else cur.bias / prev.bias for prev, cur in zip(rows, rows[1:])
    ]


# ==================== Tail probabilities ====================


class _Window:
    """Kernel window of one smoothed entry: weights, marginal factors, moments"""

    def __init__(self, config: TailExperimentConfig):
        curve = config.curve.build()
        times = default_times(config.n)
        weights = kernel.smoothing_weights(
            KernelSpec(family=config.family, bandwidth=config.h), times, config.t0
        )
        active = np.flatnonzero(weights > 0.0)
        i, j = config.entry
        index = [i] if i == j else [i, j]

        self.diagonal = i == j
        self.weights = weights[active]
        marginals = [curve.evaluator(float(times[k]))[np.ix_(index, index)] for k in active]
        self.factors = np.stack([cholesky(m) for m in marginals])
        self.scale = np.array([math.sqrt(m[0, 0] * m[-1, -1]) for m in marginals])
        self.covariance = np.array([m[0, -1] for m in marginals])
        self.expectation = float(self.weights @ self.covariance)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Smoothed entry for ``size`` independent replicates"""
        d = self.factors.shape[1]
        z = rng.standard_normal((size, self.weights.shape[0], d))
        x = np.einsum("kde,bke->bkd", self.factors, z)
        products = x[..., 0] ** 2 if self.diagonal else x[..., 0] * x[..., 1]
        return products @ self.weights

    def log_mgf(self, s: float) -> float:
        """log E exp(s·Ŝ) from the per-step closed form; +inf outside the domain"""
        u = s * self.weights
        first = 1.0 - u * (self.scale + self.covariance)
        second = 1.0 + u * (self.scale - self.covariance)
        if np.any(first <= 0.0) or np.any(second <= 0.0):
            return math.inf
        return float(-0.5 * (np.log(first).sum() + np.log(second).sum()))

    def domain_limit(self, sign: float) -> float:
        """Largest s > 0 with sign·s inside the MGF domain"""
        slope = self.weights * (self.scale + sign * self.covariance)
        positive = slope[slope > 0.0]
        return math.inf if positive.size == 0 else float(1.0 / positive.max())


def _one_sided_chernoff(window: _Window, epsilon: float, sign: float) -> float:
    """inf_s exp(−s·(sign·E + ε)) · E exp(sign·s·Ŝ)"""
    limit = window.domain_limit(sign)
    if not math.isfinite(limit):
        limit = 1e3 / float(window.weights.max())
    offset = sign * window.expectation + epsilon

    def log_bound(s: float) -> float:
        value = window.log_mgf(sign * s)
        return value - s * offset if math.isfinite(value) else 1e300

    result = optimize.minimize_scalar(
        log_bound, bounds=(0.0, limit * (1.0 - 1e-9)), method="bounded", options={"xatol": 1e-12}
    )
    return float(min(1.0, math.exp(min(0.0, result.fun))))


def chernoff_bound(config: TailExperimentConfig) -> float:
    """
    Two-sided Chernoff bound on P(|Ŝ_n(t0,i,j) − E Ŝ_n(t0,i,j)| > ε).

    Markov's inequality on exp(±s·Ŝ) with the exact per-step MGF, minimized
    over s on each side; capped at 1.
    """
    window = _Window(config)
    return _chernoff_for_window(window, config.epsilon)


def _chernoff_for_window(window: _Window, epsilon: float) -> float:
    upper = _one_sided_chernoff(window, epsilon, 1.0)
    lower = _one_sided_chernoff(window, epsilon, -1.0)
    return float(min(1.0, upper + lower))


def tail_probability(config: TailExperimentConfig, threads: Optional[int] = None) -> TailRow:
    """
    Monte-Carlo tail of one smoothed covariance entry.

    The expectation is Σ_k w_k σ_ij(t_k), computed exactly from the curve.
    Replicates run in MC_BATCH_SIZE batches, each with its own substream.

    Args:
        config: Experiment configuration
        threads: Worker cap for the batches

    Returns:
        TailRow with the empirical tail, exp(−c·n·h·ε²) and the Chernoff bound

    Raises:
        EmptyWindow: If the kernel window holds no grid point
    """
    window = _Window(config)
    batch = settings.MC_BATCH_SIZE
    sizes = [min(batch, config.replicates - start) for start in range(0, config.replicates, batch)]
    streams = _children(config.seed, len(sizes))

    def exceedances(job: Tuple[int, np.random.SeedSequence]) -> int:
        size, child = job
        values = window.sample(np.random.default_rng(child), size)
        return int(np.count_nonzero(np.abs(values - window.expectation) > config.epsilon))

    hits = sum(ordered_map(exceedances, list(zip(sizes, streams)), threads))
    mc_replicates_total.labels(experiment="tail").inc(config.replicates)

    exponent = config.n * config.h * config.epsilon**2
    row = TailRow(
        n=config.n,
        h=config.h,
        epsilon=config.epsilon,
        n_h_eps2=exponent,
        empirical_tail=hits / config.replicates,
        bound_value=math.exp(-config.rate_constant * exponent),
        chernoff_bound=_chernoff_for_window(window, config.epsilon),
        expectation=window.expectation,
        replicates=config.replicates,
    )
    logger.info(
        "tail_experiment_completed",
        n=config.n,
        h=config.h,
        epsilon=config.epsilon,
        empirical_tail=row.empirical_tail,
        chernoff_bound=row.chernoff_bound,
    )
    return row


def grid_bandwidth(n: int, scale: float) -> float:
    """h = min(1, scale·n^(−1/3))"""
    return kernel.reference_bandwidth(n, scale=scale)


def tail_grid(config: TailGridConfig, threads: Optional[int] = None) -> List[TailRow]:
    """tail_probability over config.n_values with h ∝ n^(−1/3)"""
    seeds = _children(config.seed, len(config.n_values))
    rows = []
    for n, child in zip(config.n_values, seeds):
        point = TailExperimentConfig(
            n=n,
            h=grid_bandwidth(n, config.h_scale),
            epsilon=config.epsilon,
            replicates=config.replicates,
            curve=config.curve,
            entry=config.entry,
            t0=config.t0,
            family=config.family,
            rate_constant=config.rate_constant,
            seed=int(child.generate_state(1, dtype=np.uint64)[0]),
        )
        rows.append(tail_probability(point, threads))
    return rows


def fit_tail_envelope(rows: Sequence[TailRow]) -> TailEnvelope:
    """
    Least-squares fit of log(empirical tail) against n·h·ε².

    Rows with a zero tail are skipped; fewer than two usable rows (or a
    degenerate abscissa) mark the envelope as degraded.
    """
    usable = [row for row in rows if row.empirical_tail > 0.0]
    x = np.array([row.n_h_eps2 for row in usable])
    if len(usable) < 2 or np.ptp(x) == 0.0:
        logger.warning("tail_envelope_degraded", usable_rows=len(usable))
        return TailEnvelope(usable_rows=len(usable), degraded=True)

    y = np.log([row.empirical_tail for row in usable])
    fit = stats.linregress(x, y)
    return TailEnvelope(
        usable_rows=len(usable),
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        rate=float(-fit.slope),
        degraded=False,
    )


def non_increasing_fraction(values: Sequence[float]) -> float:
    """Share of adjacent pairs with values[k+1] ≤ values[k]"""
    pairs = list(zip(values, values[1:]))
    if not pairs:
        return 1.0
    return sum(1 for a, b in pairs if b <= a) / len(pairs)


# ==================== n-grid experiments ====================


def _loglog_slope(n_values: Sequence[int], errors: Sequence[float]) -> Optional[float]:
    if len(n_values) < 2 or any(e <= 0.0 for e in errors):
        return None
    return float(stats.linregress(np.log(n_values), np.log(errors)).slope)


def frobenius_rate(
    config: RateExperimentConfig, threads: Optional[int] = None
) -> Tuple[List[RateRow], Optional[float]]:
    """
    Mean ‖Θ̂_n(t0) − Θ(t0)‖_F over replicates, per n.

    The trajectory seed is shared by every n and replicate; each replicate
    samples from its own substream. λ_n = lambda_scale·√(log n / n^(2/3)),
    h = min(1, bandwidth_scale / n^(1/3)).

    Returns:
        (rows, log-log slope of mean error against n)
    """
    rows: List[RateRow] = []
    for n, child in zip(config.n_values, _children(config.seed, len(config.n_values))):
        trajectory = simgen.generate_trajectory(config.trajectory.evolution(n, config.seed))
        theta_true = trajectory.theta_array(trajectory.step_index(config.t0))
        h = kernel.reference_bandwidth(n, scale=config.bandwidth_scale)
        lam = config.lambda_scale * math.sqrt(math.log(n) / n ** (2.0 / 3.0))
        spec = KernelSpec(family=config.family, bandwidth=h)
        penalty = PenaltySpec(lam=lam, penalize_diagonal=config.penalize_diagonal)

        def replicate_error(stream: np.random.SeedSequence) -> float:
            data = simgen.sample_data(trajectory, seed=stream)
            s_hat = kernel.smoothed_covariance(data, config.t0, spec)
            return risk.frobenius_error(glasso.fit(s_hat, penalty).theta, theta_true)

        errors = np.array(ordered_map(replicate_error, child.spawn(config.replicates), threads))
        mc_replicates_total.labels(experiment="rate").inc(config.replicates)
        rows.append(
            RateRow(
                n=n,
                h=h,
                lam=lam,
                mean_frobenius_error=float(errors.mean()),
                std_frobenius_error=float(errors.std(ddof=1)) if errors.size > 1 else 0.0,
                replicates=config.replicates,
            )
        )
        logger.info("rate_point_completed", n=n, h=h, lam=lam, mean_error=rows[-1].mean_frobenius_error)

    slope = _loglog_slope(config.n_values, [row.mean_frobenius_error for row in rows])
    logger.info("rate_experiment_completed", points=len(rows), slope=slope)
    return rows, slope


def consistency_curve(
    config: ConsistencyConfig, threads: Optional[int] = None
) -> Tuple[List[ConsistencyRow], Optional[float]]:
    """
    Mean max_{j,k} |Ŝ_n(t0)_jk − Σ(t0)_jk| over replicates, per n.

    Reported next to the reference rate √(log n) / n^(1/3).

    Returns:
        (rows, log-log slope of mean deviation against n)
    """
    rows: List[ConsistencyRow] = []
    for n, child in zip(config.n_values, _children(config.seed, len(config.n_values))):
        trajectory = simgen.generate_trajectory(config.trajectory.evolution(n, config.seed))
        sigma_true = trajectory.sigma_array(trajectory.step_index(config.t0))
        h = kernel.reference_bandwidth(n, scale=config.bandwidth_scale)
        spec = KernelSpec(family=config.family, bandwidth=h)

        def replicate_deviation(stream: np.random.SeedSequence) -> float:
            data = simgen.sample_data(trajectory, seed=stream)
            s_hat = kernel.smoothed_covariance(data, config.t0, spec)
            return float(np.max(np.abs(s_hat.entries - sigma_true)))

        deviations = ordered_map(replicate_deviation, child.spawn(config.replicates), threads)
        mc_replicates_total.labels(experiment="consistency").inc(config.replicates)
        rows.append(
            ConsistencyRow(
                n=n,
                h=h,
                mean_max_deviation=float(np.mean(deviations)),
                reference_rate=math.sqrt(math.log(n)) / n ** (1.0 / 3.0),
                replicates=config.replicates,
            )
        )

    slope = _loglog_slope(config.n_values, [row.mean_max_deviation for row in rows])
    logger.info("consistency_experiment_completed", points=len(rows), slope=slope)
    return rows, slope
