"""
Time-indexed observations Z^t, t ∈ [0, 1].
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from tvglasso.core.exceptions import DimensionMismatch
from tvglasso.utils.validators import validate_time_grid


def default_times(n: int) -> np.ndarray:
    """Uniform grid t_k = k/(n−1) on [0, 1]; [0.0] for a single observation"""
    if n < 1:
        raise ValueError("At least one observation is required")
    return np.linspace(0.0, 1.0, n)


@dataclass(frozen=True, eq=False)
class TimeSeriesData:
    """
    n observations of a p-vector with an attached, strictly increasing
    time grid in [0, 1].
    """

    observations: np.ndarray
    times: np.ndarray

    def __post_init__(self) -> None:
        obs = np.array(self.observations, dtype=np.float64, copy=True)
        if obs.ndim == 1:
            obs = obs.reshape(1, -1)
        if obs.ndim != 2 or obs.shape[0] == 0 or obs.shape[1] == 0:
            raise DimensionMismatch(f"Observations must be a non-empty n×p array, got {obs.shape}")
        if not np.all(np.isfinite(obs)):
            raise ValueError("Observations must be finite")

        times = np.array(self.times, dtype=np.float64, copy=True).reshape(-1)
        if times.shape[0] != obs.shape[0]:
            raise DimensionMismatch(
                f"{obs.shape[0]} observations but {times.shape[0]} time stamps"
            )
        if not validate_time_grid(times):
            raise ValueError("Time stamps must lie in [0, 1] and be strictly increasing")

        obs.setflags(write=False)
        times.setflags(write=False)
        object.__setattr__(self, "observations", obs)
        object.__setattr__(self, "times", times)

    @classmethod
    def from_observations(
        cls, observations: ArrayLike, times: Optional[ArrayLike] = None
    ) -> "TimeSeriesData":
        """Attach the default uniform grid when no times are given"""
        obs = np.asarray(observations, dtype=np.float64)
        n = obs.shape[0] if obs.ndim > 1 else 1
        return cls(obs, default_times(n) if times is None else np.asarray(times))

    @property
    def n(self) -> int:
        return int(self.observations.shape[0])

    @property
    def p(self) -> int:
        return int(self.observations.shape[1])

    def window(self, start: int, stop: int) -> "TimeSeriesData":
        """Rows start..stop-1 with their time stamps"""
        return TimeSeriesData(self.observations[start:stop], self.times[start:stop])
