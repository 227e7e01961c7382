"""
Unit tests for the verification laboratory.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from tvglasso.core.exceptions import EmptyWindow, OutOfDomain
from tvglasso.schemas.experiment import (
    BiasConfig,
    ConsistencyConfig,
    CurveSpec,
    MgfConfig,
    RateExperimentConfig,
    TailExperimentConfig,
    TailRow,
    TrajectoryParams,
)
from tvglasso.schemas.kernel import KernelFamily
from tvglasso.services import devlab

AFFINE = CurveSpec(kind="affine", base=[[1.0, 0.0], [0.0, 1.0]], slope=[[0.0, 1.0], [1.0, 0.0]])
QUADRATIC = CurveSpec(
    kind="quadratic",
    base=[[1.0, 0.0], [0.0, 1.0]],
    slope=[[0.0, 0.5], [0.5, 0.0]],
    curvature=[[0.0, 0.25], [0.25, 0.0]],
)
CORRELATED = CurveSpec(base=[[1.0, 0.4], [0.4, 1.0]])
SMALL_TRAJECTORY = TrajectoryParams(p=5, initial_edges=3, churn_count=1)


def _tail_row(n, empirical):
    return TailRow(
        n=n,
        h=0.5,
        epsilon=0.3,
        n_h_eps2=n * 0.5 * 0.09,
        empirical_tail=empirical,
        bound_value=0.0,
        chernoff_bound=1.0,
        expectation=0.0,
        replicates=1000,
    )


class TestMgf:
    """Tests for the Gaussian product MGF."""

    def test_zero_argument(self):
        """Test M(0) = 1."""
        assert devlab.mgf_product_normals(0.0, 1.3, 0.7, 0.4) == 1.0

    def test_independent_unit_pair(self):
        """Test M(1/2) = (3/4)^(−1/2) for independent standard normals."""
        assert devlab.mgf_product_normals(0.5, 1.0, 1.0, 0.0) == pytest.approx(0.75**-0.5)

    def test_sign_symmetry(self):
        """Test M(t; ρ) = M(−t; −ρ)."""
        for t, rho in [(0.2, 0.3), (0.4, -0.6), (0.1, 0.9)]:
            assert devlab.mgf_product_normals(t, 1.2, 0.8, rho) == pytest.approx(
                devlab.mgf_product_normals(-t, 1.2, 0.8, -rho)
            )

    def test_jensen_lower_bound(self):
        """Test M(t) ≥ exp(t·σ_ij)."""
        for t in np.linspace(-0.4, 0.4, 9):
            value = devlab.mgf_product_normals(float(t), 1.0, 1.0, 0.5)
            assert value >= math.exp(float(t) * 0.5) - 1e-12

    def test_squared_normal(self):
        """Test E exp(t·Z²) = (1 − 2tσ²)^(−1/2)."""
        assert devlab.mgf_squared_normal(0.1, 2.0) == pytest.approx((1.0 - 0.8) ** -0.5)

    def test_out_of_domain(self):
        """Test OutOfDomain at and beyond the singularity."""
        with pytest.raises(OutOfDomain):
            devlab.mgf_product_normals(1.0, 1.0, 1.0, 0.0)
        with pytest.raises(OutOfDomain):
            devlab.mgf_squared_normal(0.5, 1.0)

    def test_invalid_parameters(self):
        """Test ValueError for a non-positive deviation or |ρ| > 1."""
        with pytest.raises(ValueError):
            devlab.mgf_product_normals(0.1, 0.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            devlab.mgf_product_normals(0.1, 1.0, 1.0, 1.5)

    def test_monte_carlo_agrees(self):
        """Test the Monte-Carlo mean within four standard errors of the closed form."""
        exact = devlab.mgf_product_normals(0.2, 1.0, 1.5, 0.3)
        mean, stderr = devlab.monte_carlo_mgf(0.2, 1.0, 1.5, 0.3, draws=20000, seed=4)
        assert stderr > 0.0
        assert abs(mean - exact) <= 4.0 * stderr

    def test_table(self):
        """Test one row per t with Monte-Carlo columns only when draws > 0."""
        rows = devlab.mgf_table(MgfConfig(t_values=[0.0, 0.1, 0.2]))
        assert [row.t for row in rows] == [0.0, 0.1, 0.2]
        assert all(row.monte_carlo_mean is None for row in rows)

        rows = devlab.mgf_table(MgfConfig(t_values=[0.1], draws=2000, seed=1))
        assert rows[0].monte_carlo_stderr is not None


class TestBias:
    """Tests for the deterministic smoother bias."""

    def test_constant_curve(self):
        """Test zero bias for a constant covariance."""
        rows = devlab.bias_experiment(BiasConfig(curve=CORRELATED, n=1001))
        assert all(row.bias == pytest.approx(0.0, abs=1e-12) for row in rows)

    def test_linear_boundary_bias(self):
        """Test signed bias ≈ −h/2 for a unit slope at t0 = 1 with the boxcar."""
        rows = devlab.bias_experiment(BiasConfig(curve=AFFINE, t0=1.0, n=10001))
        for row in rows:
            assert row.signed_bias == pytest.approx(-row.h / 2.0, rel=1e-2)

    def test_quadratic_ratios(self):
        """Test |bias| roughly halving with h at the boundary."""
        rows = devlab.bias_experiment(BiasConfig(curve=QUADRATIC, t0=1.0, n=10001))
        ratios = devlab.bias_ratios(rows)
        assert all(0.4 <= ratio <= 0.6 for ratio in ratios)

    def test_interior_quadratic(self):
        """Test that a symmetric window cancels the slope and leaves an O(h²) bias."""
        rows = devlab.bias_experiment(BiasConfig(curve=QUADRATIC, t0=0.5, n=10001))
        ratios = devlab.bias_ratios(rows)
        assert all(0.15 <= ratio <= 0.35 for ratio in ratios)

    def test_empty_window(self):
        """Test EmptyWindow when no grid point lies within h of t0."""
        with pytest.raises(EmptyWindow):
            devlab.bias_experiment(BiasConfig(curve=AFFINE, t0=0.25, h_values=[0.01], n=3))

    def test_entry_outside_curve(self):
        """Test that an entry beyond the curve dimension is rejected."""
        with pytest.raises(ValidationError):
            BiasConfig(curve=AFFINE, entry=(0, 2))


class TestTail:
    """Tests for tail probabilities and their envelopes."""

    def test_huge_epsilon(self):
        """Test a zero empirical tail when ε dwarfs every deviation."""
        config = TailExperimentConfig(n=200, h=0.5, epsilon=100.0, replicates=1000, curve=CORRELATED)
        row = devlab.tail_probability(config)
        assert row.empirical_tail == 0.0
        assert row.chernoff_bound < 1e-6

    def test_expectation_is_exact(self):
        """Test E Ŝ_ij = σ_ij for a constant curve."""
        config = TailExperimentConfig(n=100, h=0.5, epsilon=0.2, replicates=1000, curve=CORRELATED)
        assert devlab.tail_probability(config).expectation == pytest.approx(0.4)

    def test_chernoff_dominates(self):
        """Test the Chernoff bound above the empirical tail up to sampling error."""
        for epsilon in (0.1, 0.2, 0.3):
            config = TailExperimentConfig(
                n=200, h=0.5, epsilon=epsilon, replicates=4000, curve=CORRELATED, seed=8
            )
            row = devlab.tail_probability(config)
            noise = 3.0 * math.sqrt(max(row.chernoff_bound * (1.0 - row.chernoff_bound), 1e-6) / 4000)
            assert row.empirical_tail <= row.chernoff_bound + noise
            assert devlab.chernoff_bound(config) == pytest.approx(row.chernoff_bound)

    def test_diagonal_entry(self):
        """Test the squared-entry path on a diagonal element."""
        config = TailExperimentConfig(
            n=200, h=0.5, epsilon=0.3, replicates=1000, curve=CORRELATED, entry=(1, 1)
        )
        row = devlab.tail_probability(config)
        assert row.expectation == pytest.approx(1.0)
        assert 0.0 <= row.empirical_tail <= 1.0

    def test_deterministic(self):
        """Test identical rows for identical seeds and any thread count."""
        config = TailExperimentConfig(n=100, h=0.5, epsilon=0.2, replicates=3000, curve=CORRELATED, seed=5)
        assert devlab.tail_probability(config, threads=1) == devlab.tail_probability(config, threads=3)

    def test_envelope_fit(self):
        """Test recovery of an exact exponential tail."""
        rows = [_tail_row(n, math.exp(-0.1 * n * 0.045)) for n in (100, 200, 400)]
        envelope = devlab.fit_tail_envelope(rows)
        assert not envelope.degraded
        assert envelope.usable_rows == 3
        assert envelope.rate == pytest.approx(0.1)
        assert envelope.intercept == pytest.approx(0.0, abs=1e-9)

    def test_envelope_degraded(self):
        """Test a degraded envelope with fewer than two positive tails."""
        rows = [_tail_row(100, 0.2), _tail_row(200, 0.0), _tail_row(400, 0.0)]
        envelope = devlab.fit_tail_envelope(rows)
        assert envelope.degraded
        assert envelope.rate is None

    def test_non_increasing_fraction(self):
        """Test the share of non-increasing neighbours."""
        assert devlab.non_increasing_fraction([0.5, 0.4, 0.4, 0.6, 0.1]) == 0.75
        assert devlab.non_increasing_fraction([0.5]) == 1.0

    def test_grid_bandwidth(self):
        """Test h = min(1, scale·n^(−1/3))."""
        assert devlab.grid_bandwidth(1000, 1.0) == pytest.approx(0.1)
        assert devlab.grid_bandwidth(8, 5.0) == 1.0


class TestGridExperiments:
    """Tests for the n-grid rate and consistency experiments."""

    def test_frobenius_rate(self):
        """Test one row per n with positive errors and a slope."""
        config = RateExperimentConfig(
            n_values=[60, 120], replicates=2, trajectory=SMALL_TRAJECTORY, seed=3
        )
        rows, slope = devlab.frobenius_rate(config)
        assert [row.n for row in rows] == [60, 120]
        assert all(row.mean_frobenius_error > 0.0 for row in rows)
        assert slope is not None and math.isfinite(slope)

    def test_rate_is_deterministic(self):
        """Test identical results for identical seeds and any thread count."""
        config = RateExperimentConfig(
            n_values=[60, 120], replicates=2, trajectory=SMALL_TRAJECTORY, seed=3
        )
        assert devlab.frobenius_rate(config, threads=1) == devlab.frobenius_rate(config, threads=2)

    def test_consistency_curve(self):
        """Test max-entry deviations alongside the reference rate."""
        config = ConsistencyConfig(
            n_values=[60, 240], replicates=3, trajectory=SMALL_TRAJECTORY, family=KernelFamily.EPANECHNIKOV
        )
        rows, slope = devlab.consistency_curve(config)
        assert len(rows) == 2
        assert rows[1].reference_rate < rows[0].reference_rate
        assert all(row.mean_max_deviation > 0.0 for row in rows)
        assert slope is not None

    def test_n_values_must_increase(self):
        """Test that a non-increasing n grid is rejected."""
        with pytest.raises(ValidationError):
            RateExperimentConfig(n_values=[400, 200])
