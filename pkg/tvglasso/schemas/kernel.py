"""
Kernel smoothing schemas.
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class KernelFamily(str, Enum):
    """Kernel families with support contained in [-1, 1]"""

    BOXCAR = "boxcar"
    EPANECHNIKOV = "epanechnikov"
    TRUNCATED_GAUSSIAN = "truncated_gaussian"


class KernelSpec(BaseModel):
    """Kernel family plus bandwidth h ∈ (0, 1]"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    family: KernelFamily = KernelFamily.TRUNCATED_GAUSSIAN
    bandwidth: float = Field(..., gt=0.0, le=1.0)
