"""
Piecewise-linear trajectory of sparse precision matrices

    Θ(t_k) = base_diag·I + Σ_e w_e(k)·L_e

where L_e is the Laplacian of the single edge e = (i, j): −1 at (i, j) and
(j, i), +1 at (i, i) and (j, j).
"""

from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from tvglasso.core.exceptions import DimensionMismatch
from tvglasso.core.linalg import spd_inverse_array
from tvglasso.models.graph import Edge, EdgeSet
from tvglasso.models.matrices import PrecisionMatrix
from tvglasso.models.series import default_times
from tvglasso.schemas.simulation import EvolutionConfig


class EdgeEvent(NamedTuple):
    """
    Lifetime of one edge.

    ``birth_step`` is the step its ramp starts (0 for edges present from the
    start); ``death_step`` is the step its decay completes, None when the edge
    is still active at the last step.
    """

    edge: Edge
    birth_step: int
    death_step: Optional[int]


@dataclass(frozen=True, eq=False)
class GraphTrajectory:
    """
    Evolving graph stored as edge weights per step.

    ``weights[k, e]`` is the weight of ``edges[e]`` at step k; a weight of
    zero means the edge is absent. Columns are kept in sorted edge order.
    """

    p: int
    base_diag: float
    edges: Tuple[Edge, ...]
    weights: np.ndarray
    times: np.ndarray
    config: Optional[EvolutionConfig] = None

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=np.float64, copy=True)
        if weights.ndim != 2 or weights.shape[1] != len(self.edges):
            raise DimensionMismatch(
                f"Weights of shape {weights.shape} do not match {len(self.edges)} edges"
            )
        times = np.array(self.times, dtype=np.float64, copy=True).reshape(-1)
        if times.shape[0] != weights.shape[0]:
            raise DimensionMismatch(f"{weights.shape[0]} steps but {times.shape[0]} times")
        if np.any(weights < 0.0):
            raise ValueError("Edge weights must be nonnegative")
        if self.base_diag <= 0.0:
            raise ValueError("base_diag must be positive")
        for i, j in self.edges:
            if not 0 <= i < j < self.p:
                raise ValueError(f"Invalid edge ({i}, {j}) for dimension {self.p}")

        # canonical column order keeps Θ bit-identical however the edges were listed
        edges = [(int(i), int(j)) for i, j in self.edges]
        order = sorted(range(len(edges)), key=edges.__getitem__)
        weights = np.ascontiguousarray(weights[:, order])

        weights.setflags(write=False)
        times.setflags(write=False)
        object.__setattr__(self, "edges", tuple(edges[e] for e in order))
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "times", times)

    @classmethod
    def from_weights(
        cls,
        p: int,
        base_diag: float,
        edges: List[Edge],
        weights: np.ndarray,
        config: Optional[EvolutionConfig] = None,
    ) -> "GraphTrajectory":
        """Attach the uniform time grid t_k = k/(n−1)"""
        weights = np.asarray(weights, dtype=np.float64)
        return cls(p, base_diag, tuple(edges), weights, default_times(weights.shape[0]), config)

    @property
    def steps(self) -> int:
        return int(self.weights.shape[0])

    def _laplacian(self, edge_weights: np.ndarray) -> np.ndarray:
        lap = np.zeros((self.p, self.p))
        if not self.edges:
            return lap
        rows = np.array([e[0] for e in self.edges])
        cols = np.array([e[1] for e in self.edges])
        np.add.at(lap, (rows, cols), -edge_weights)
        np.add.at(lap, (cols, rows), -edge_weights)
        np.add.at(lap, (rows, rows), edge_weights)
        np.add.at(lap, (cols, cols), edge_weights)
        return lap

    def theta_array(self, k: int) -> np.ndarray:
        """Θ at step k as a plain array"""
        return self.base_diag * np.eye(self.p) + self._laplacian(self.weights[k])

    def theta(self, k: int) -> PrecisionMatrix:
        return PrecisionMatrix(self.theta_array(k))

    def sigma_array(self, k: int) -> np.ndarray:
        """Σ(t_k) = Θ(t_k)⁻¹"""
        return spd_inverse_array(self.theta_array(k))

    @property
    def thetas(self) -> List[PrecisionMatrix]:
        """Every Θ(t_k); materializes steps × p × p values"""
        return [self.theta(k) for k in range(self.steps)]

    def edge_set(self, k: int) -> EdgeSet:
        """Edges with nonzero weight at step k"""
        active = np.flatnonzero(self.weights[k] > 0.0)
        return EdgeSet(self.p, frozenset(self.edges[e] for e in active))

    @property
    def edge_sets(self) -> List[EdgeSet]:
        return [self.edge_set(k) for k in range(self.steps)]

    def theta_derivative_array(self, k: int) -> np.ndarray:
        """
        Right derivative dΘ/dt on the segment [t_k, t_{k+1}].

        The last step reuses the final segment.
        """
        if self.steps < 2:
            return np.zeros((self.p, self.p))
        k = min(k, self.steps - 2)
        dt = self.times[k + 1] - self.times[k]
        return self._laplacian((self.weights[k + 1] - self.weights[k]) / dt)

    def step_index(self, t: float) -> int:
        """Index of the last grid point at or before t"""
        index = int(np.searchsorted(self.times, t, side="right")) - 1
        return min(max(index, 0), self.steps - 1)

    def events(self) -> List[EdgeEvent]:
        """
        Lifetimes of every edge, one per maximal run of nonzero weight.

        A run starting after step 0 was born one step earlier, when its ramp
        started from zero.
        """
        result: List[EdgeEvent] = []
        for e, edge in enumerate(self.edges):
            active = self.weights[:, e] > 0.0
            padded = np.concatenate(([False], active, [False])).astype(np.int8)
            changes = np.diff(padded)
            starts = np.flatnonzero(changes == 1)
            stops = np.flatnonzero(changes == -1)
            for start, stop in zip(starts, stops):
                birth = 0 if start == 0 else int(start) - 1
                death = int(stop) if stop < self.steps else None
                result.append(EdgeEvent(edge, birth, death))
        result.sort(key=lambda event: (event.birth_step, event.edge))
        return result
