"""
Verification-lab experiment schemas: configurations and result rows.
"""

from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from tvglasso.models.curve import MatrixCurve
from tvglasso.schemas.kernel import KernelFamily
from tvglasso.schemas.simulation import EvolutionConfig
from tvglasso.utils.validators import validate_square, validate_strictly_increasing

Matrix = List[List[float]]


def _strictly_increasing(values: List[int]) -> List[int]:
    if not validate_strictly_increasing(values, min_length=2):
        raise ValueError("Expected at least two strictly increasing values")
    return values


# ==================== Curve Schemas ====================


class CurveSpec(BaseModel):
    """
    Covariance curve Σ(t) = B + t·A + t²·C.

    ``kind`` fixes which coefficients are used: constant (B), affine (B, A)
    or quadratic (B, A, C).
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["constant", "affine", "quadratic"] = "constant"
    base: Matrix = Field(default_factory=lambda: [[1.0, 0.0], [0.0, 1.0]])
    slope: Optional[Matrix] = None
    curvature: Optional[Matrix] = None

    @model_validator(mode="after")
    def check_coefficients(self) -> "CurveSpec":
        """Coefficients present, square and of equal size"""
        needed = {"constant": [], "affine": ["slope"], "quadratic": ["slope", "curvature"]}[self.kind]
        for name in needed:
            if getattr(self, name) is None:
                raise ValueError(f"A {self.kind} curve needs '{name}'")
        dim = len(self.base)
        for name in ("base", "slope", "curvature"):
            matrix = getattr(self, name)
            if matrix is not None and not validate_square(matrix, dim):
                raise ValueError(f"'{name}' must be a {dim}×{dim} matrix")
        return self

    @property
    def dim(self) -> int:
        return len(self.base)

    def build(self) -> MatrixCurve:
        """MatrixCurve with analytic derivatives"""
        base = np.array(self.base, dtype=np.float64)
        if self.kind == "constant":
            return MatrixCurve.constant(base)
        if self.kind == "affine":
            return MatrixCurve.affine(base, np.array(self.slope))
        return MatrixCurve.quadratic(base, np.array(self.slope), np.array(self.curvature))


class _EntryMixin(BaseModel):
    entry: Tuple[int, int] = (0, 1)

    @field_validator("entry")
    @classmethod
    def check_entry(cls, v: Tuple[int, int]) -> Tuple[int, int]:
        """Entries are 0-based and nonnegative"""
        if min(v) < 0:
            raise ValueError("entry indices must be nonnegative")
        return v


# ==================== MGF Schemas ====================


class MgfConfig(BaseModel):
    """Closed-form MGF of Z_i·Z_j over a grid of t, optionally checked by Monte Carlo"""

    model_config = ConfigDict(extra="forbid")

    t_values: List[float] = Field(default_factory=lambda: [0.0])
    sigma_i: float = Field(1.0, gt=0.0)
    sigma_j: float = Field(1.0, gt=0.0)
    rho: float = Field(0.0, ge=-1.0, le=1.0)
    draws: int = Field(0, ge=0)
    seed: int = Field(0, ge=0, lt=2**64)

    @field_validator("t_values")
    @classmethod
    def check_t_values(cls, v: List[float]) -> List[float]:
        """At least one t"""
        if not v:
            raise ValueError("t_values must not be empty")
        return v


class MgfRow(BaseModel):
    t: float
    mgf: float
    monte_carlo_mean: Optional[float] = None
    monte_carlo_stderr: Optional[float] = None


# ==================== Bias Schemas ====================


class BiasConfig(_EntryMixin):
    """Deterministic smoother bias over a bandwidth grid"""

    model_config = ConfigDict(extra="forbid")

    curve: CurveSpec = Field(default_factory=CurveSpec)
    t0: float = Field(1.0, ge=0.0, le=1.0)
    family: KernelFamily = KernelFamily.BOXCAR
    h_values: List[float] = Field(default_factory=lambda: [0.4, 0.2, 0.1, 0.05])
    n: int = Field(10000, ge=1)

    @model_validator(mode="after")
    def check_grid(self) -> "BiasConfig":
        """Bandwidths in (0, 1] and entry inside the curve"""
        if not self.h_values or any(not 0.0 < h <= 1.0 for h in self.h_values):
            raise ValueError("h_values must be a non-empty list of bandwidths in (0, 1]")
        if max(self.entry) >= self.curve.dim:
            raise ValueError(f"entry {self.entry} outside a {self.curve.dim}×{self.curve.dim} curve")
        return self


class BiasRow(BaseModel):
    h: float
    bias: float
    signed_bias: float


# ==================== Tail Schemas ====================


class TailExperimentConfig(_EntryMixin):
    """
    Monte-Carlo tail of one entry of the smoothed covariance.

    ``rate_constant`` is the c of the reported envelope exp(−c·n·h·ε²).
    """

    model_config = ConfigDict(extra="forbid")

    n: int = Field(..., ge=1)
    h: float = Field(..., gt=0.0, le=1.0)
    epsilon: float = Field(..., gt=0.0)
    replicates: int = Field(10000, ge=1000)
    curve: CurveSpec = Field(default_factory=CurveSpec)
    t0: float = Field(0.5, ge=0.0, le=1.0)
    family: KernelFamily = KernelFamily.BOXCAR
    rate_constant: float = Field(0.1, gt=0.0)
    seed: int = Field(0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def check_entry_dim(self) -> "TailExperimentConfig":
        """Entry inside the curve"""
        if max(self.entry) >= self.curve.dim:
            raise ValueError(f"entry {self.entry} outside a {self.curve.dim}×{self.curve.dim} curve")
        return self


class TailGridConfig(_EntryMixin):
    """Tail experiment repeated over n with h = min(1, h_scale·n^(−1/3))"""

    model_config = ConfigDict(extra="forbid")

    n_values: List[int] = Field(default_factory=lambda: [250, 500, 1000, 2000])
    h_scale: float = Field(1.0, gt=0.0)
    epsilon: float = Field(0.3, gt=0.0)
    replicates: int = Field(10000, ge=1000)
    curve: CurveSpec = Field(default_factory=CurveSpec)
    t0: float = Field(0.5, ge=0.0, le=1.0)
    family: KernelFamily = KernelFamily.BOXCAR
    rate_constant: float = Field(0.1, gt=0.0)
    seed: int = Field(0, ge=0, lt=2**64)

    @field_validator("n_values")
    @classmethod
    def check_n_values(cls, v: List[int]) -> List[int]:
        """Increasing sample sizes"""
        return _strictly_increasing(v)

    @model_validator(mode="after")
    def check_entry_dim(self) -> "TailGridConfig":
        """Entry inside the curve"""
        if max(self.entry) >= self.curve.dim:
            raise ValueError(f"entry {self.entry} outside a {self.curve.dim}×{self.curve.dim} curve")
        return self


class TailRow(BaseModel):
    n: int
    h: float
    epsilon: float
    n_h_eps2: float
    empirical_tail: float
    bound_value: float
    chernoff_bound: float
    expectation: float
    replicates: int


class TailEnvelope(BaseModel):
    """Least-squares fit of log tail against n·h·ε²"""

    usable_rows: int
    slope: Optional[float] = None
    intercept: Optional[float] = None
    rate: Optional[float] = None
    degraded: bool


# ==================== Rate Schemas ====================


class TrajectoryParams(BaseModel):
    """
    Evolving-graph parameters shared by the n-grid experiments.

    The churn period is ``churn_fraction``·n, so Θ(t) is the same function
    of t for every n.
    """

    model_config = ConfigDict(extra="forbid")

    p: int = Field(20, ge=2)
    base_diag: float = Field(0.25, gt=0.0)
    initial_edges: int = Field(20, ge=0)
    churn_count: int = Field(2, ge=0)
    churn_fraction: float = Field(0.25, gt=0.0, le=1.0)
    churn_rounds: Optional[int] = Field(None, ge=0)
    weight_range: Tuple[float, float] = (0.1, 0.3)

    def evolution(self, n: int, seed: int) -> EvolutionConfig:
        """Generator config for n steps"""
        return EvolutionConfig(
            p=self.p,
            steps=n,
            base_diag=self.base_diag,
            initial_edges=self.initial_edges,
            churn_period=max(1, int(round(self.churn_fraction * n))),
            churn_count=self.churn_count,
            churn_rounds=self.churn_rounds,
            weight_range=self.weight_range,
            seed=seed,
        )


class RateExperimentConfig(BaseModel):
    """Frobenius error of the smoothed estimator at t0 over an n grid"""

    model_config = ConfigDict(extra="forbid")

    n_values: List[int] = Field(default_factory=lambda: [200, 400, 800, 1600])
    replicates: int = Field(10, ge=1)
    trajectory: TrajectoryParams = Field(default_factory=TrajectoryParams)
    lambda_scale: float = Field(0.5, gt=0.0)
    bandwidth_scale: float = Field(5.848, gt=0.0)
    t0: float = Field(1.0, ge=0.0, le=1.0)
    family: KernelFamily = KernelFamily.TRUNCATED_GAUSSIAN
    penalize_diagonal: bool = False
    seed: int = Field(0, ge=0, lt=2**64)

    @field_validator("n_values")
    @classmethod
    def check_n_values(cls, v: List[int]) -> List[int]:
        """Increasing sample sizes"""
        return _strictly_increasing(v)

    @model_validator(mode="after")
    def check_trajectory(self) -> "RateExperimentConfig":
        """Every n yields a valid generator config"""
        for n in self.n_values:
            self.trajectory.evolution(n, self.seed)
        return self


class RateRow(BaseModel):
    n: int
    h: float
    lam: float = Field(..., alias="lambda")
    mean_frobenius_error: float
    std_frobenius_error: float
    replicates: int

    model_config = ConfigDict(populate_by_name=True)


class ConsistencyConfig(BaseModel):
    """Mean max-entry error of Ŝ_n(t0) against Σ(t0) over an n grid"""

    model_config = ConfigDict(extra="forbid")

    n_values: List[int] = Field(default_factory=lambda: [200, 400, 800, 1600])
    replicates: int = Field(20, ge=1)
    trajectory: TrajectoryParams = Field(default_factory=TrajectoryParams)
    bandwidth_scale: float = Field(5.848, gt=0.0)
    t0: float = Field(1.0, ge=0.0, le=1.0)
    family: KernelFamily = KernelFamily.TRUNCATED_GAUSSIAN
    seed: int = Field(0, ge=0, lt=2**64)

    @field_validator("n_values")
    @classmethod
    def check_n_values(cls, v: List[int]) -> List[int]:
        """Increasing sample sizes"""
        return _strictly_increasing(v)


class ConsistencyRow(BaseModel):
    n: int
    h: float
    mean_max_deviation: float
    reference_rate: float
    replicates: int


# ==================== Summary ====================


class ExperimentSummary(BaseModel):
    """JSON summary written next to every experiment CSV"""

    experiment: str
    config: Dict[str, Any]
    statistics: Dict[str, Any] = Field(default_factory=dict)
    fitted: Dict[str, Any] = Field(default_factory=dict)
