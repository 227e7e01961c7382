"""
Evolving-graph generator and Gaussian sampler.

Starting from Θ = base_diag·I, ``initial_edges`` random edges are added at
full weight. A churn round starting at step b picks ``churn_count`` existing
edges whose weights decay linearly to zero by step b + churn_period, and
``churn_count`` new edges whose weights ramp linearly from zero to a fresh
uniform draw over the same steps. Within a round the decaying edges are
pairwise node-disjoint, and so are the ramping edges, which bounds every
entrywise step change by weight_high / churn_period.

Trajectory generation and data sampling draw from two independent children
of the seed's SeedSequence.
"""

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from tvglasso.core.exceptions import ArtifactFormatError, ConfigInvalid
from tvglasso.core.linalg import cholesky
from tvglasso.core.logging import get_logger
from tvglasso.models.graph import Edge, normalize_edge
from tvglasso.models.series import TimeSeriesData
from tvglasso.models.trajectory import EdgeEvent, GraphTrajectory
from tvglasso.schemas.simulation import EvolutionConfig
from tvglasso.utils import io
from tvglasso.utils.metrics import trajectories_generated_total

logger = get_logger(__name__)


SeedLike = Union[int, np.random.SeedSequence]


def _streams(seed: SeedLike) -> Tuple[np.random.Generator, np.random.Generator]:
    if isinstance(seed, np.random.SeedSequence):
        # fresh copy: spawn() advances the child counter of its receiver
        root = np.random.SeedSequence(seed.entropy, spawn_key=seed.spawn_key)
    else:
        root = np.random.SeedSequence(seed)
    graph_seq, sample_seq = root.spawn(2)
    return np.random.default_rng(graph_seq), np.random.default_rng(sample_seq)


def _pick_disjoint(rng: np.random.Generator, candidates: Sequence[Edge], count: int) -> List[Edge]:
    """Uniformly shuffled greedy pick of ``count`` node-disjoint edges"""
    picked: List[Edge] = []
    used: set[int] = set()
    for index in rng.permutation(len(candidates)):
        i, j = candidates[int(index)]
        if i in used or j in used:
            continue
        picked.append((i, j))
        used.update((i, j))
        if len(picked) == count:
            return picked
    raise ConfigInvalid(
        f"Could not find {count} node-disjoint edges among {len(candidates)} candidates"
    )


class _Lifetime:
    __slots__ = ("edge", "weight", "ramp_start", "decay_start")

    def __init__(self, edge: Edge, weight: float, ramp_start: Optional[int]):
        self.edge = edge
        self.weight = weight
        self.ramp_start = ramp_start
        self.decay_start: Optional[int] = None

    def profile(self, steps: np.ndarray, period: int) -> np.ndarray:
        up = np.ones(steps.shape)
        if self.ramp_start is not None:
            up = np.clip((steps - self.ramp_start) / period, 0.0, 1.0)
        down = np.ones(steps.shape)
        if self.decay_start is not None:
            down = np.clip(1.0 - (steps - self.decay_start) / period, 0.0, 1.0)
        return self.weight * np.minimum(up, down)


def generate_trajectory(config: EvolutionConfig) -> GraphTrajectory:
    """
    Generate the evolving precision-matrix trajectory.

    Args:
        config: Generator parameters

    Returns:
        GraphTrajectory with one Θ per step, λ_min(Θ) ≥ base_diag throughout

    Raises:
        ConfigInvalid: If the churn cannot be realized with node-disjoint edges
    """
    rng, _ = _streams(config.seed)
    low, high = config.weight_range
    pairs: List[Edge] = [(i, j) for i in range(config.p) for j in range(i + 1, config.p)]

    lifetimes: List[_Lifetime] = []
    active: Dict[Edge, _Lifetime] = {}

    chosen = rng.choice(len(pairs), size=config.initial_edges, replace=False)
    for index in chosen:
        lifetime = _Lifetime(pairs[int(index)], float(rng.uniform(low, high)), None)
        lifetimes.append(lifetime)
        active[lifetime.edge] = lifetime

    for boundary in config.churn_boundaries():
        # previous round's decays complete exactly at this boundary
        active = {e: lt for e, lt in active.items() if lt.decay_start is None}

        full_weight = sorted(active)
        dying = _pick_disjoint(rng, full_weight, config.churn_count)
        free = [pair for pair in pairs if pair not in active]
        born = _pick_disjoint(rng, free, config.churn_count)

        for edge in dying:
            active[edge].decay_start = boundary
        for edge in born:
            lifetime = _Lifetime(edge, float(rng.uniform(low, high)), boundary)
            lifetimes.append(lifetime)
            active[edge] = lifetime

    edges: List[Edge] = []
    column: Dict[Edge, int] = {}
    for lifetime in lifetimes:
        if lifetime.edge not in column:
            column[lifetime.edge] = len(edges)
            edges.append(lifetime.edge)

    step_index = np.arange(config.steps, dtype=np.float64)
    weights = np.zeros((config.steps, len(edges)))
    for lifetime in lifetimes:
        weights[:, column[lifetime.edge]] += lifetime.profile(step_index, config.churn_period)

    trajectory = GraphTrajectory.from_weights(config.p, config.base_diag, edges, weights, config)
    trajectories_generated_total.inc()
    logger.info(
        "trajectory_generated",
        p=config.p,
        steps=config.steps,
        edges_ever=len(edges),
        churn_rounds=len(config.churn_boundaries()),
        seed=config.seed,
    )
    return trajectory


def fixed_trajectory(
    p: int,
    base_diag: float,
    weighted_edges: Sequence[Tuple[int, int, float]],
    steps: int,
) -> GraphTrajectory:
    """
    Constant trajectory Θ = base_diag·I + Σ a·L_(i,j) for every step.

    Args:
        p: Dimension
        base_diag: Diagonal offset
        weighted_edges: (i, j, weight) triples with positive weights
        steps: Number of steps

    Returns:
        GraphTrajectory whose thetas are all equal
    """
    edges = [normalize_edge(i, j) for i, j, _ in weighted_edges]
    row = np.array([float(a) for _, _, a in weighted_edges])
    weights = np.tile(row, (steps, 1)) if edges else np.zeros((steps, 0))
    return GraphTrajectory.from_weights(p, base_diag, edges, weights)


def sample_data(trajectory: GraphTrajectory, seed: Optional[SeedLike] = None) -> TimeSeriesData:
    """
    Draw Z^{t_k} ~ N(0, Σ(t_k)) independently per step.

    Row k is L_k·z_k with L_k the Cholesky factor of Σ(t_k) and z_k standard
    normal.

    Args:
        trajectory: Precision trajectory
        seed: Integer seed or SeedSequence; defaults to the generator seed
            of the trajectory

    Returns:
        TimeSeriesData on the trajectory's time grid
    """
    if seed is None:
        seed = trajectory.config.seed if trajectory.config is not None else 0
    _, rng = _streams(seed)

    z = rng.standard_normal((trajectory.steps, trajectory.p))
    observations = np.empty_like(z)
    factor: Optional[np.ndarray] = None
    for k in range(trajectory.steps):
        if factor is None or not np.array_equal(trajectory.weights[k], trajectory.weights[k - 1]):
            factor = cholesky(trajectory.sigma_array(k))
        observations[k] = factor @ z[k]

    logger.debug("data_sampled", steps=trajectory.steps, p=trajectory.p, seed=seed)
    return TimeSeriesData(observations, trajectory.times)


def edge_events(trajectory: GraphTrajectory) -> List[EdgeEvent]:
    """
    (edge, birth_step, death_step) for every edge lifetime.

    Birth is the step the ramp starts (0 for initial edges); death is the
    step the decay completes, None when the edge survives to the last step.
    """
    return trajectory.events()


# ==================== Artifacts ====================


def trajectory_records(trajectory: GraphTrajectory) -> List[Dict[str, object]]:
    """One record per step: {step, t, p, base_diag, edges: [[i, j, weight], ...]}"""
    records = []
    for k in range(trajectory.steps):
        row = trajectory.weights[k]
        active = np.flatnonzero(row > 0.0)
        edges = sorted(
            [trajectory.edges[e][0], trajectory.edges[e][1], float(row[e])] for e in active
        )
        records.append(
            {
                "step": k,
                "t": float(trajectory.times[k]),
                "p": trajectory.p,
                "base_diag": trajectory.base_diag,
                "edges": edges,
            }
        )
    return records


def export_trajectory(trajectory: GraphTrajectory, path: Union[str, Path]) -> None:
    """Write the trajectory as JSON lines"""
    io.write_jsonl(path, trajectory_records(trajectory))


def load_trajectory(path: Union[str, Path]) -> GraphTrajectory:
    """
    Read a JSON-lines trajectory.

    Raises:
        ArtifactFormatError: On missing keys or non-consecutive steps
    """
    records = io.read_jsonl(path)
    if not records:
        raise ArtifactFormatError(f"Trajectory file {path} is empty")
    try:
        p = int(records[0]["p"])
        base_diag = float(records[0]["base_diag"])
        column: Dict[Edge, int] = {}
        entries: List[Tuple[int, int, float]] = []
        times = []
        for k, record in enumerate(records):
            if int(record["step"]) != k:
                raise ArtifactFormatError(f"Expected step {k}, found {record['step']}")
            times.append(float(record["t"]))
            for i, j, weight in record["edges"]:
                edge = normalize_edge(i, j)
                column.setdefault(edge, len(column))
                entries.append((k, column[edge], float(weight)))
    except (KeyError, TypeError, ValueError) as e:
        raise ArtifactFormatError(f"Malformed trajectory record in {path}: {e}") from e

    weights = np.zeros((len(records), len(column)))
    for k, e, weight in entries:
        weights[k, e] = weight
    return GraphTrajectory(p, base_diag, tuple(column), weights, np.array(times))


def data_frame(data: TimeSeriesData) -> pd.DataFrame:
    """Columns t, z1, ..., zp"""
    frame = pd.DataFrame(data.observations, columns=[f"z{i + 1}" for i in range(data.p)])
    frame.insert(0, "t", data.times)
    return frame


def export_data(data: TimeSeriesData, path: Union[str, Path]) -> None:
    """Write observations as CSV with header t,z1,...,zp"""
    io.write_frame(path, data_frame(data))


def load_data(path: Union[str, Path]) -> TimeSeriesData:
    """
    Read a t,z1,...,zp CSV.

    Raises:
        ArtifactFormatError: On a wrong header or unparseable values
    """
    frame = io.read_frame(path)
    expected = ["t"] + [f"z{i + 1}" for i in range(frame.shape[1] - 1)]
    if list(frame.columns) != expected or frame.shape[1] < 2:
        raise ArtifactFormatError(f"{path}: expected header t,z1,...,zp, got {list(frame.columns)}")
    try:
        values = frame.to_numpy(dtype=np.float64)
        return TimeSeriesData(values[:, 1:], values[:, 0])
    except ValueError as e:
        raise ArtifactFormatError(f"{path}: {e}") from e
