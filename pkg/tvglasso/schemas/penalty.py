"""
Penalty schema for the ℓ1-penalized log-determinant problem.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class PenaltySpec(BaseModel):
    """
    Penalty weight λ and whether diagonal entries of Θ are penalized.

    Graph-recovery runs default to penalizing only off-diagonal entries.
    """

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    lam: float = Field(..., ge=0.0, alias="lambda")
    penalize_diagonal: bool = False

    def with_lambda(self, lam: float) -> "PenaltySpec":
        """Same scope, different weight"""
        return PenaltySpec(lam=lam, penalize_diagonal=self.penalize_diagonal)

    def mask(self, p: int) -> np.ndarray:
        """Boolean p×p mask of penalized entries"""
        mask = np.ones((p, p), dtype=bool)
        if not self.penalize_diagonal:
            np.fill_diagonal(mask, False)
        return mask
