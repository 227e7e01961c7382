"""
Command run configurations.

Each command validates its merged configuration (defaults, then the
``--config`` JSON file, then explicit flags) against one of these models.
``out`` is always an output directory.
"""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from tvglasso.schemas.kernel import KernelFamily
from tvglasso.schemas.simulation import EvolutionConfig
from tvglasso.utils.validators import validate_penalty_grid

# ==================== Simulation Runs ====================


class SimulateRun(EvolutionConfig):
    """Generator parameters plus the data sampling seed and output directory"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    sample_seed: Optional[int] = Field(None, ge=0, lt=2**64)
    out: str = "simulation"


# ==================== Estimation Runs ====================


class _SmoothingRun(BaseModel):
    data: str
    t0: float = Field(1.0, ge=0.0, le=1.0)
    kernel: KernelFamily = KernelFamily.TRUNCATED_GAUSSIAN
    bandwidth: Optional[float] = Field(None, gt=0.0, le=1.0)
    bandwidth_scale: float = Field(5.848, gt=0.0)
    penalize_diagonal: bool = False
    zero_tol: Optional[float] = Field(None, ge=0.0)
    tol: Optional[float] = Field(None, gt=0.0)
    max_iter: Optional[int] = Field(None, ge=1)
    threads: Optional[int] = Field(None, ge=1)


class EstimateRun(_SmoothingRun):
    """Single fit of Θ̂(t0)"""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    lam: float = Field(..., alias="lambda", ge=0.0)
    out: str = "estimate"


class PathRun(_SmoothingRun):
    """Regularization path at t0 with optional ground truth"""

    model_config = ConfigDict(extra="forbid")

    lambdas: Optional[List[float]] = None
    lambda_count: int = Field(20, ge=1)
    lambda_ratio: float = Field(100.0, gt=1.0)
    truth: Optional[str] = None
    out: str = "path"

    @field_validator("lambdas")
    @classmethod
    def check_lambdas(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        """Positive and distinct; any order"""
        if v is None:
            return v
        if not validate_penalty_grid(v):
            raise ValueError("lambdas must be a non-empty list of distinct positive values")
        return v


class TrackRun(BaseModel):
    """Edge-latency tracking along the whole series"""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    data: str
    truth: str
    lam: float = Field(0.1, alias="lambda", gt=0.0)
    kernel: KernelFamily = KernelFamily.TRUNCATED_GAUSSIAN
    bandwidth: Optional[float] = Field(None, gt=0.0, le=1.0)
    bandwidth_scale: float = Field(5.848, gt=0.0)
    stride: int = Field(1, ge=1)
    penalize_diagonal: bool = False
    zero_tol: Optional[float] = Field(None, ge=0.0)
    oracle: bool = False
    tol: Optional[float] = Field(None, gt=0.0)
    max_iter: Optional[int] = Field(None, ge=1)
    threads: Optional[int] = Field(None, ge=1)
    out: str = "track"
