"""
End-to-end acceptance runs at the reference protocol sizes.

The slow runs are deselected with ``-m "not slow"``.
"""

import hashlib
import json

import numpy as np
import pandas as pd
import pytest

from tvglasso.main import EXIT_OK
from tvglasso.schemas.experiment import RateExperimentConfig, TailGridConfig
from tvglasso.services import devlab


def _digests(directory):
    return {
        path.name: hashlib.sha256(path.read_bytes()).hexdigest()
        for path in sorted(directory.iterdir())
    }


def _inversions(values):
    return sum(1 for a, b in zip(values, values[1:]) if b > a)


@pytest.mark.slow
class TestRegularizationPathReproduction:
    """Oracle-versus-estimator comparison along the λ path at n = 200."""

    def test_path_over_seeds(self, run_cli, tmp_path):
        """Test recall and edge-count monotonicity and oracle dominance over ten seeds."""
        wins = 0
        pairs = 0
        for seed in range(10):
            sim = tmp_path / f"sim{seed}"
            out = tmp_path / f"path{seed}"
            assert run_cli(["simulate", "--steps", "200", "--seed", str(seed), "--out", str(sim)]) == EXIT_OK
            assert run_cli(["path", "--data", str(sim / "data.csv"), "--truth", str(sim / "trajectory.jsonl"),
                            "--t0", "1.0", "--out", str(out)]) == EXIT_OK

            frame = pd.read_csv(out / "path.csv")
            assert len(frame) == 20
            assert _inversions(frame["recall"].tolist()) <= 1
            assert _inversions(frame["edge_count"].tolist()) == 0

            summary = json.loads((out / "path_summary.json").read_text())
            wins += summary["oracle_not_worse"]
            pairs += summary["matched_pairs"]

        assert pairs > 0
        assert wins / pairs >= 0.7


@pytest.mark.slow
class TestEdgeListsOverPenalties:
    """Edge lists of Θ̂(1) at n = 200, h = 1 for three penalties."""

    def test_edge_counts_do_not_grow_with_lambda(self, run_cli, tmp_path):
        """Test non-increasing edge counts for λ = 0.14, 0.2, 0.24."""
        sim = tmp_path / "sim"
        assert run_cli(["simulate", "--steps", "200", "--seed", "1", "--out", str(sim)]) == EXIT_OK
        counts = []
        for lam in ("0.14", "0.2", "0.24"):
            out = tmp_path / f"estimate-{lam}"
            code = run_cli(["estimate", "--data", str(sim / "data.csv"), "--t0", "1.0", "--lambda", lam,
                            "--kernel", "truncated_gaussian", "--bandwidth", "1.0", "--out", str(out)])
            assert code == EXIT_OK
            meta = json.loads((out / "precision.json").read_text())["meta"]
            assert meta["converged"]
            assert len(pd.read_csv(out / "edges.csv")) == meta["edge_count"]
            counts.append(meta["edge_count"])
        assert counts[0] >= counts[1] >= counts[2]


@pytest.mark.slow
class TestEdgeReplacementTracking:
    """One churn round at step 0 over 400 steps."""

    def test_replaced_edges_are_removed(self, run_cli, tmp_path):
        """Test five edges dying at step 200 and an estimator that drops all of them for some λ."""
        sim = tmp_path / "sim"
        assert run_cli(["simulate", "--steps", "400", "--churn-period", "200", "--churn-rounds", "1",
                        "--seed", "2", "--out", str(sim)]) == EXIT_OK
        data = str(sim / "data.csv")
        truth = str(sim / "trajectory.jsonl")

        oracle = tmp_path / "oracle"
        assert run_cli(["track", "--data", data, "--truth", truth, "--oracle", "--out", str(oracle)]) == EXIT_OK
        frame = pd.read_csv(oracle / "track.csv")
        removed = frame[frame["kind"] == "removed"]
        added = frame[frame["kind"] == "added"]
        assert len(removed) == 5
        assert (removed["death_step"] == 200).all()
        assert len(added) == 5
        assert (added["birth_step"] == 0).all()
        assert (frame["latency"] == 0).all()

        removed_for = []
        for lam in ("0.05", "0.1", "0.15", "0.2"):
            out = tmp_path / f"track-{lam}"
            code = run_cli(["track", "--data", data, "--truth", truth, "--lambda", lam, "--bandwidth", "0.2",
                            "--stride", "20", "--threads", "4", "--out", str(out)])
            assert code == EXIT_OK
            rows = pd.read_csv(out / "track.csv")
            if rows.loc[rows["kind"] == "removed", "estimated_step"].notna().all():
                removed_for.append(lam)
        assert removed_for


@pytest.mark.slow
class TestMgfAgainstMonteCarlo:
    """Closed-form MGF against one million draws."""

    def test_random_parameters(self):
        """Test ten random parameter sets within three standard errors."""
        rng = np.random.default_rng(2024)
        for index in range(10):
            sigma_i, sigma_j = rng.uniform(0.5, 2.0, size=2)
            rho = rng.uniform(-0.9, 0.9)
            # keeps 2t inside the domain so the draws have finite variance
            t = rng.uniform(-1.0, 1.0) * 0.25 / (sigma_i * sigma_j * (1.0 + abs(rho)))
            exact = devlab.mgf_product_normals(t, sigma_i, sigma_j, rho)
            mean, stderr = devlab.monte_carlo_mgf(t, sigma_i, sigma_j, rho, draws=1_000_000, seed=index)
            assert abs(mean - exact) <= 3.0 * stderr


@pytest.mark.slow
class TestTailEnvelope:
    """Tail decay over n with h ∝ n^(−1/3)."""

    def test_tail_decays(self):
        """Test a non-increasing tail and a negative log-tail slope."""
        config = TailGridConfig(epsilon=0.2, seed=17)
        rows = devlab.tail_grid(config)
        assert [row.n for row in rows] == [250, 500, 1000, 2000]
        assert devlab.non_increasing_fraction([row.empirical_tail for row in rows]) >= 0.9
        assert all(row.empirical_tail <= row.chernoff_bound + 0.01 for row in rows)

        envelope = devlab.fit_tail_envelope(rows)
        assert not envelope.degraded
        assert envelope.slope < 0.0


@pytest.mark.slow
class TestFrobeniusRate:
    """Frobenius error trend of Θ̂_n(t0) over n."""

    def test_error_decreases(self):
        """Test strictly decreasing mean error and a log-log slope in [−0.5, −0.15]."""
        rows, slope = devlab.frobenius_rate(RateExperimentConfig(seed=5))
        errors = [row.mean_frobenius_error for row in rows]
        assert all(b < a for a, b in zip(errors, errors[1:]))
        assert -0.5 <= slope <= -0.15


class TestDeterminism:
    """Byte-identical outputs for identical configuration and seed."""

    def test_every_command(self, run_cli, simulation_dir, small_lab_config, tmp_path):
        """Test SHA-256 equality across reruns of every command."""
        data = str(simulation_dir / "data.csv")
        truth = str(simulation_dir / "trajectory.jsonl")
        lab = str(small_lab_config)
        commands = {
            "simulate": ["simulate", "--p", "6", "--steps", "40", "--initial-edges", "4", "--churn-period", "20",
                         "--churn-count", "1", "--seed", "2"],
            "estimate": ["estimate", "--data", data, "--lambda", "0.1"],
            "path": ["path", "--data", data, "--truth", truth],
            "track": ["track", "--data", data, "--truth", truth, "--stride", "10", "--threads", "2"],
            "mgf": ["devlab", "mgf", "--t", "0.1,0.2", "--draws", "3000", "--seed", "4"],
            "bias": ["devlab", "bias", "--n", "501"],
            "tail": ["devlab", "tail", "--n-values", "100,200", "--replicates", "1000", "--seed", "4"],
            "rate": ["devlab", "rate", "--config", lab, "--n-values", "40,80", "--replicates", "2", "--seed", "4"],
            "consistency": ["devlab", "consistency", "--config", lab, "--n-values", "40,80", "--replicates", "2",
                            "--seed", "4", "--threads", "2"],
        }
        for name, args in commands.items():
            first = tmp_path / f"{name}-1"
            second = tmp_path / f"{name}-2"
            assert run_cli(args + ["--out", str(first)]) == EXIT_OK
            assert run_cli(args + ["--out", str(second)]) == EXIT_OK
            assert _digests(first) == _digests(second), name
