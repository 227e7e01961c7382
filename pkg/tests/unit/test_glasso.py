"""
Unit tests for the graphical lasso solver.
"""

import itertools

import numpy as np
import pytest

from tvglasso.core.exceptions import MaxIterationsExceeded, SingularInput, ZeroDiagonal
from tvglasso.schemas.penalty import PenaltySpec
from tvglasso.services import glasso

TOL = 1e-6


def _off_diagonal(p: int):
    return [(i, j) for i, j in itertools.combinations(range(p), 2)]


def _determinant(theta: np.ndarray) -> np.ndarray:
    """Batched determinant of stacked 2×2 or 3×3 matrices"""
    if theta.shape[-1] == 2:
        return theta[:, 0, 0] * theta[:, 1, 1] - theta[:, 0, 1] ** 2
    return np.linalg.det(theta)


def brute_force_glasso(S: np.ndarray, lam: float, points: int, rounds: int) -> np.ndarray:
    """
    Minimize tr(ΘS) − log|Θ| + λ·|Θ_off|₁ by nested grid refinement.

    The box is recentred on the best grid point each round and shrunk unless
    that point sits on the box boundary.
    """
    p = S.shape[0]
    pairs = [(i, i) for i in range(p)] + _off_diagonal(p)
    center = np.array([np.linalg.inv(S)[i, j] for i, j in pairs])
    radius = np.full(len(pairs), 1.0 + 1.5 * np.abs(center).max())
    offsets = np.linspace(-1.0, 1.0, points)
    mesh = np.stack(np.meshgrid(*[offsets] * len(pairs), indexing="ij"), axis=-1).reshape(-1, len(pairs))

    for _ in range(rounds):
        candidates = center + mesh * radius
        theta = np.zeros((candidates.shape[0], p, p))
        for column, (i, j) in enumerate(pairs):
            theta[:, i, j] = candidates[:, column]
            theta[:, j, i] = candidates[:, column]
        det = _determinant(theta)
        leading = theta[:, 0, 0]
        minors = theta[:, 0, 0] * theta[:, 1, 1] - theta[:, 0, 1] ** 2
        feasible = (leading > 0.0) & (minors > 0.0) & (det > 0.0)

        objective = np.full(candidates.shape[0], np.inf)
        trace = np.einsum("bij,ji->b", theta[feasible], S)
        off = sum(np.abs(theta[feasible, i, j]) for i, j in _off_diagonal(p))
        objective[feasible] = trace - np.log(det[feasible]) + lam * 2.0 * off

        best = int(np.argmin(objective))
        on_boundary = np.any(np.abs(mesh[best]) == 1.0)
        center = candidates[best]
        if not on_boundary:
            radius = radius * 0.75

    result = np.zeros((p, p))
    for column, (i, j) in enumerate(pairs):
        result[i, j] = result[j, i] = center[column]
    return result


class TestFitExamples:
    """Tests for fit on hand-checkable inputs."""

    def test_identity_mle(self):
        """Test that S = I, λ = 0 gives Θ̂ = I."""
        result = glasso.fit(np.eye(5), PenaltySpec(lam=0.0))
        np.testing.assert_allclose(result.theta.entries, np.eye(5), atol=1e-12)
        assert result.converged

    def test_screening_identity(self, random_spd):
        """Test that λ ≥ λ_max forces the diagonal solution exactly."""
        S = random_spd(6)
        lam = glasso.lambda_max(S)
        for scale in (1.0, 1.5):
            result = glasso.fit(S, PenaltySpec(lam=scale * lam))
            np.testing.assert_allclose(result.theta.entries, np.diag(1.0 / np.diag(S)), atol=1e-8)
            assert len(glasso.edges_of(result.theta)) == 0

    def test_two_by_two_oracle_example(self):
        """Test S = [[1, 0.6], [0.6, 1]], λ = 0.2 against brute force."""
        S = np.array([[1.0, 0.6], [0.6, 1.0]])
        expected = brute_force_glasso(S, 0.2, points=11, rounds=80)
        result = glasso.fit(S, PenaltySpec(lam=0.2), tol=TOL)
        np.testing.assert_allclose(result.theta.entries, expected, atol=1e-4)

    def test_singular_input_without_penalty(self):
        """Test SingularInput for λ = 0 and singular S."""
        z = np.array([1.0, 2.0, 3.0])
        with pytest.raises(SingularInput):
            glasso.fit(np.outer(z, z), PenaltySpec(lam=0.0))

    def test_singular_input_with_penalty(self, rng):
        """Test that λ > 0 yields a PD estimate from a rank-deficient S."""
        z = rng.standard_normal((3, 6))
        S = z.T @ z / 3.0
        result = glasso.fit(S, PenaltySpec(lam=0.1))
        assert result.kkt_residual <= TOL
        assert np.linalg.eigvalsh(result.theta.entries)[0] > 0.0

    def test_zero_diagonal(self):
        """Test ZeroDiagonal for an off-diagonal penalty and s_ii = 0."""
        with pytest.raises(ZeroDiagonal):
            glasso.fit(np.diag([1.0, 0.0]), PenaltySpec(lam=0.1))

    def test_max_iterations_attaches_flagged_fit(self, random_spd):
        """Test that the cap raises with the best iterate flagged unconverged."""
        S = random_spd(6)
        with pytest.raises(MaxIterationsExceeded) as excinfo:
            glasso.fit(S, PenaltySpec(lam=0.05), tol=1e-15, max_iter=1)
        best = excinfo.value.fit
        assert best is not None
        assert best.converged is False
        assert best.kkt_residual > 1e-15
        assert best.meta()["converged"] is False


class TestFitProperties:
    """Property tests over random inputs."""

    @pytest.mark.parametrize("penalize_diagonal", [False, True])
    def test_kkt_and_inverse(self, random_spd, penalize_diagonal):
        """Test KKT soundness and Θ̂·Σ̂ ≈ I in both penalty modes."""
        for p in (3, 5, 8):
            S = random_spd(p)
            result = glasso.fit(S, PenaltySpec(lam=0.1, penalize_diagonal=penalize_diagonal), tol=TOL)
            assert result.kkt_residual <= TOL
            assert glasso.kkt_residual(S, result.theta, result.penalty) <= TOL
            product = result.theta.entries @ result.sigma.entries
            assert np.max(np.abs(product - np.eye(p))) <= 1e-6

    def test_dual_feasibility(self, random_spd):
        """Test |Σ̂_ij − S_ij| ≤ λ off the diagonal."""
        S = random_spd(7)
        lam = 0.15
        result = glasso.fit(S, PenaltySpec(lam=lam), tol=TOL)
        gap = np.abs(result.sigma.entries - S)
        np.fill_diagonal(gap, 0.0)
        assert gap.max() <= lam + 10 * TOL

    def test_objective_does_not_increase(self, random_spd):
        """Test that the final objective is no worse than the starting one."""
        S = random_spd(6)
        result = glasso.fit(S, PenaltySpec(lam=0.05), tol=TOL)
        assert result.objective_trace[-1] <= result.objective_trace[0] + 1e-12
        assert result.objective == pytest.approx(
            glasso.penalized_objective(S, result.theta, result.penalty), rel=1e-12
        )

    def test_oracle_equivalence_2x2(self, rng):
        """Test agreement with brute force on 20 random 2×2 inputs."""
        for _ in range(20):
            a = rng.standard_normal((2, 2))
            S = a @ a.T + 0.3 * np.eye(2)
            lam = float(rng.uniform(0.02, 0.5))
            result = glasso.fit(S, PenaltySpec(lam=lam), tol=TOL)
            assert result.kkt_residual <= TOL
            expected = brute_force_glasso(S, lam, points=11, rounds=80)
            np.testing.assert_allclose(result.theta.entries, expected, atol=1e-4)

    def test_oracle_equivalence_3x3(self, rng):
        """Test agreement with brute force on 10 random 3×3 inputs."""
        for _ in range(10):
            a = rng.standard_normal((3, 3))
            S = a @ a.T / 3.0 + 0.5 * np.eye(3)
            lam = float(rng.uniform(0.02, 0.3))
            result = glasso.fit(S, PenaltySpec(lam=lam), tol=TOL)
            assert result.kkt_residual <= TOL
            expected = brute_force_glasso(S, lam, points=7, rounds=70)
            np.testing.assert_allclose(result.theta.entries, expected, atol=1e-4)


class TestLassoSubproblem:
    """Tests for the column lasso solved inside each block sweep."""

    def test_optimality_conditions(self, random_spd, rng):
        """Test |u − Vβ|_k = λ with matching sign on the support and ≤ λ off it."""
        V = random_spd(12)
        u = rng.standard_normal(12)
        lam = 0.3
        beta = glasso._lasso_cd(V, u, lam, np.zeros(12), 1e-12, 10000)
        gradient = u - V @ beta
        support = beta != 0.0
        assert support.any()
        np.testing.assert_allclose(gradient[support], lam * np.sign(beta[support]), atol=1e-7)
        assert np.all(np.abs(gradient[~support]) <= lam + 1e-7)

    def test_zero_solution_below_threshold(self, random_spd):
        """Test β = 0 when every |u_k| ≤ λ, including u = 0."""
        V = random_spd(4)
        warm = np.ones(4)
        np.testing.assert_array_equal(glasso._lasso_cd(V, np.zeros(4), 0.1, warm, 1e-10, 100), 0.0)
        u = np.array([0.05, -0.1, 0.0, 0.08])
        np.testing.assert_array_equal(glasso._lasso_cd(V, u, 0.1, warm, 1e-10, 100), 0.0)


class TestRankDeficientInput:
    """Tests on sample covariances with fewer observations than variables."""

    @pytest.mark.parametrize("penalize_diagonal", [False, True])
    @pytest.mark.parametrize("lam", [0.3, 0.05, 0.01])
    def test_converges_with_kkt_certificate(self, rng, lam, penalize_diagonal):
        """Test a certified fit for n = 10, p = 30 in both penalty modes."""
        z = rng.standard_normal((10, 30))
        S = z.T @ z / 10
        penalty = PenaltySpec(lam=lam, penalize_diagonal=penalize_diagonal)
        result = glasso.fit(S, penalty, tol=TOL)
        assert result.converged
        assert glasso.kkt_residual(S, result.theta, penalty) <= TOL
        trace = np.array(result.objective_trace)
        assert np.all(np.diff(trace) <= 1e-9 * np.maximum(1.0, np.abs(trace[1:])))


class TestKktResidual:
    """Tests for kkt_residual."""

    def test_identity_stationary(self):
        """Test residual 0 at (I, I, λ = 0)."""
        assert glasso.kkt_residual(np.eye(3), np.eye(3), PenaltySpec(lam=0.0)) == 0.0

    def test_diagonal_stationary(self):
        """Test residual 0 at (diag(s), diag(1/s)) with any off-diagonal λ."""
        s = np.array([1.0, 2.0, 4.0])
        residual = glasso.kkt_residual(np.diag(s), np.diag(1.0 / s), PenaltySpec(lam=0.3))
        assert residual == pytest.approx(0.0, abs=1e-12)

    def test_detects_violation(self):
        """Test a positive residual when an off-diagonal gradient exceeds λ."""
        S = np.array([[1.0, 0.5], [0.5, 1.0]])
        residual = glasso.kkt_residual(S, np.eye(2), PenaltySpec(lam=0.1))
        assert residual == pytest.approx(0.4)


class TestEdgesOf:
    """Tests for edges_of."""

    def test_identity(self):
        """Test that a diagonal matrix has no edges."""
        assert len(glasso.edges_of(np.eye(4), 1e-6)) == 0

    def test_single_edge(self):
        """Test θ_01 = −0.2 gives {(0, 1)}."""
        theta = np.eye(3)
        theta[0, 1] = theta[1, 0] = -0.2
        assert glasso.edges_of(theta, 1e-6).edges == frozenset({(0, 1)})

    def test_threshold_is_strict(self):
        """Test that |θ_ij| equal to zero_tol is not an edge."""
        theta = np.eye(2)
        theta[0, 1] = theta[1, 0] = 0.5
        assert len(glasso.edges_of(theta, 0.5)) == 0

    def test_negative_tolerance(self):
        """Test that zero_tol must be nonnegative."""
        with pytest.raises(ValueError):
            glasso.edges_of(np.eye(2), -1.0)


class TestRegularizationPath:
    """Tests for regularization_path."""

    def test_first_fit_at_lambda_max_is_diagonal(self, random_spd):
        """Test the screening threshold at the head of the default grid."""
        S = random_spd(6)
        grid = glasso.default_lambda_grid(S)
        assert len(grid) == 20
        assert grid[0] == pytest.approx(glasso.lambda_max(S))
        assert grid[-1] == pytest.approx(glasso.lambda_max(S) / 100.0)
        fits = glasso.regularization_path(S, grid[:5], tol=TOL)
        assert len(glasso.edges_of(fits[0].theta)) == 0

    def test_warm_start_matches_cold_start(self, random_spd):
        """Test objective agreement with independent fits."""
        S = random_spd(6)
        grid = glasso.default_lambda_grid(S, count=6, ratio=20.0)
        for warm in glasso.regularization_path(S, grid, tol=TOL):
            cold = glasso.fit(S, warm.penalty, tol=TOL)
            assert abs(warm.objective - cold.objective) <= 10 * TOL

    def test_l1_shrinks_with_lambda(self, random_spd):
        """Test |Θ̂(λ₂)|₁ ≤ |Θ̂(λ₁)|₁ for λ₂ ≥ λ₁."""
        S = random_spd(8)
        fits = glasso.regularization_path(S, glasso.default_lambda_grid(S, count=10), tol=TOL)
        norms = [glasso.penalized_l1(f.theta, f.penalty) for f in fits]
        # fits run from large to small λ
        assert all(b >= a - 10 * TOL for a, b in zip(norms, norms[1:]))

    def test_single_point_path_equals_fit(self, random_spd):
        """Test that a one-element path is a plain fit."""
        S = random_spd(4)
        (only,) = glasso.regularization_path(S, [0.1], tol=TOL)
        single = glasso.fit(S, PenaltySpec(lam=0.1), tol=TOL)
        np.testing.assert_allclose(only.theta.entries, single.theta.entries, atol=1e-6)

    @pytest.mark.parametrize("grid", [[0.1, 0.2], [0.2, 0.2], [], [0.1, -0.1]])
    def test_invalid_grid(self, random_spd, grid):
        """Test that only strictly decreasing positive grids are accepted."""
        with pytest.raises(ValueError):
            glasso.regularization_path(random_spd(3), grid)
