"""
Report schemas for estimator evaluation and smoothness budgets.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

# ==================== Risk Report ====================

RISK_REPORT_COLUMNS: List[str] = [
    "lambda",
    "l1_norm",
    "edge_count",
    "precision",
    "recall",
    "predictive_risk",
    "empirical_risk",
    "graph_loss",
]

ORACLE_COLUMNS: List[str] = [
    "oracle_l1_norm",
    "oracle_edge_count",
    "oracle_predictive_risk",
]


class RiskReport(BaseModel):
    """
    Evaluation of one fit on a λ grid.

    Precision is undefined (None) when no edge is estimated and recall is
    undefined when the true graph is empty; both, together with the
    predictive risk and graph loss, are undefined when no truth is given.
    """

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    lam: float = Field(..., alias="lambda", ge=0.0)
    l1_norm: float = Field(..., ge=0.0)
    edge_count: int = Field(..., ge=0)
    precision: Optional[float] = Field(None, ge=0.0, le=1.0)
    recall: Optional[float] = Field(None, ge=0.0, le=1.0)
    predictive_risk: Optional[float] = None
    empirical_risk: float
    graph_loss: Optional[int] = Field(None, ge=0)

    oracle_l1_norm: Optional[float] = None
    oracle_edge_count: Optional[int] = None
    oracle_predictive_risk: Optional[float] = None

    @model_validator(mode="after")
    def check_precision_defined(self) -> "RiskReport":
        """Precision is defined exactly when edges were estimated"""
        if self.edge_count == 0 and self.precision is not None:
            raise ValueError("precision is undefined for an empty estimated edge set")
        return self

    def to_row(self, with_oracle: bool = False) -> Dict[str, Any]:
        """Ordered CSV row; undefined fields stay None (empty cells)"""
        row = {column: getattr(self, "lam" if column == "lambda" else column)
               for column in RISK_REPORT_COLUMNS}
        if with_oracle:
            row.update({column: getattr(self, column) for column in ORACLE_COLUMNS})
        return row


# ==================== Smoothness Budget ====================


class SmoothnessReport(BaseModel):
    """
    Grid suprema of the covariance derivatives and their analytic bounds.

    The constants are suprema over the evaluation grid only.
    """

    model_config = ConfigDict(extra="forbid")

    grid_points: int
    s0: float
    s1: float
    s1_quadruple: Optional[float] = None
    s2: float
    sup_sigma_dot: float
    sup_sigma_ddot: float
    bound_first: float
    bound_second: float
    first_bound_holds: bool
    second_bound_holds: bool
    note: str = "constants are suprema over the evaluation grid, not over [0, 1]"
