"""
Evolving-graph simulation schemas.
"""

from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

# ==================== Evolution Schemas ====================


class EvolutionConfig(BaseModel):
    """
    Parameters of the evolving sparse precision-matrix trajectory.

    Defaults reproduce the reference protocol: p = 50, Θ = 0.25·I, 50 initial
    edges, five edges replaced every 200 steps, weights uniform on [0.1, 0.3].
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    p: int = Field(50, ge=2)
    steps: int = Field(1000, ge=1)
    base_diag: float = Field(0.25, gt=0.0)
    initial_edges: int = Field(50, ge=0)
    churn_period: int = Field(200, ge=1)
    churn_count: int = Field(5, ge=0)
    churn_rounds: Optional[int] = Field(None, ge=0)
    weight_range: Tuple[float, float] = (0.1, 0.3)
    seed: int = Field(0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def check_invariants(self) -> "EvolutionConfig":
        """Cross-field constraints of the generator"""
        low, high = self.weight_range
        if not 0.0 < low <= high:
            raise ValueError(f"weight_range must satisfy 0 < low <= high, got {self.weight_range}")

        pairs = self.p * (self.p - 1) // 2
        if self.initial_edges > pairs:
            raise ValueError(f"initial_edges={self.initial_edges} exceeds {pairs} vertex pairs")
        if self.churn_count > self.initial_edges:
            raise ValueError("churn_count cannot exceed initial_edges")
        if self.churn_count and 2 * self.churn_count > self.p:
            raise ValueError("churn_count node-disjoint edges need 2·churn_count <= p")
        if self.churn_count and self.initial_edges + self.churn_count > pairs:
            raise ValueError("Too few free vertex pairs for the churned edges")
        return self

    @property
    def weight_low(self) -> float:
        return self.weight_range[0]

    @property
    def weight_high(self) -> float:
        return self.weight_range[1]

    def churn_boundaries(self) -> list[int]:
        """
        Steps at which a churn round starts.

        Every multiple of churn_period strictly before the last step,
        truncated to churn_rounds when set.
        """
        if self.churn_count == 0:
            return []
        boundaries = list(range(0, max(self.steps - 1, 0), self.churn_period))
        if self.churn_rounds is not None:
            boundaries = boundaries[: self.churn_rounds]
        return boundaries
