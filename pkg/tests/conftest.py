"""
Pytest configuration and fixtures for testing.
"""

import json
from pathlib import Path
from typing import Callable, List

import numpy as np
import pytest

from tvglasso.main import main
from tvglasso.models.series import TimeSeriesData
from tvglasso.models.trajectory import GraphTrajectory
from tvglasso.schemas.simulation import EvolutionConfig
from tvglasso.services import simgen


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: long Monte-Carlo acceptance runs")


@pytest.fixture
def rng() -> np.random.Generator:
    """
    Seeded generator for test inputs.
    """
    return np.random.default_rng(20240611)


@pytest.fixture
def random_spd(rng: np.random.Generator) -> Callable[[int], np.ndarray]:
    """
    Factory for well-conditioned random positive definite matrices.
    """

    def _make(p: int) -> np.ndarray:
        a = rng.standard_normal((p, p))
        return a @ a.T / p + 0.5 * np.eye(p)

    return _make


@pytest.fixture
def small_config() -> EvolutionConfig:
    """
    Small evolving-graph configuration with two churn rounds.
    """
    return EvolutionConfig(
        p=8,
        steps=60,
        base_diag=0.25,
        initial_edges=6,
        churn_period=20,
        churn_count=2,
        weight_range=(0.1, 0.3),
        seed=7,
    )


@pytest.fixture
def small_trajectory(small_config: EvolutionConfig) -> GraphTrajectory:
    """
    Trajectory generated from small_config.
    """
    return simgen.generate_trajectory(small_config)


@pytest.fixture
def small_data(small_trajectory: GraphTrajectory) -> TimeSeriesData:
    """
    Data sampled along small_trajectory.
    """
    return simgen.sample_data(small_trajectory, seed=11)


@pytest.fixture
def simulation_dir(tmp_path: Path) -> Path:
    """
    Output directory of a small `simulate` run (trajectory.jsonl, data.csv).
    """
    out = tmp_path / "sim"
    code = main(
        [
            "simulate",
            "--p", "6",
            "--steps", "80",
            "--initial-edges", "5",
            "--churn-period", "40",
            "--churn-count", "2",
            "--seed", "3",
            "--out", str(out),
        ]
    )
    assert code == 0
    return out


@pytest.fixture
def run_cli() -> Callable[[List[str]], int]:
    """
    Run the command-line entry point in-process.
    """
    return main


@pytest.fixture
def small_lab_config(tmp_path: Path) -> Path:
    """
    JSON config with a six-node trajectory for the n-grid experiments.
    """
    path = tmp_path / "lab.json"
    path.write_text(json.dumps({"trajectory": {"p": 6, "initial_edges": 4, "churn_count": 1}}))
    return path
