"""
Report Models

Results of optimality verification, no-trade analysis, exhaustive search and
property certification.
"""

import math
from enum import Enum
from typing import Literal

from pydantic import BaseModel, Field

from src.models.market import Trade

# Relative slack absorbing rounding in closed-interval tests.
ROUNDING_SLACK = 8.0 * 2.220446049250313e-16


class Verdict(str, Enum):
    """Outcome of an optimality check."""

    VERIFIED = "verified"
    VIOLATED = "violated"
    NOT_APPLICABLE = "not_applicable"


class IndexPartition(BaseModel):
    """
    Partition of asset indices by trade pattern.

    Attributes:
        drained: Received up to the full reserve (x_i = R_i)
        received: Received in part (0 < x_i < R_i)
        tendered: Tendered (y_i > 0)
        untouched: Neither received nor tendered
    """

    drained: list[int] = Field(default_factory=list)
    received: list[int] = Field(default_factory=list)
    tendered: list[int] = Field(default_factory=list)
    untouched: list[int] = Field(default_factory=list)

    @property
    def has_equality_rows(self) -> bool:
        return bool(self.received or self.tendered)


class AlphaInterval(BaseModel):
    """
    Interval of multipliers alpha compatible with the no-trade conditions.

    ``upper`` is ``math.inf`` when no index bounds alpha from above.
    """

    lower: float = Field(..., description="max_i pi_i / p_i")
    upper: float = Field(..., description="min_i pi_i / (gamma_i p_i)")

    def is_nonempty(self, tol: float = 0.0) -> bool:
        """Closed-interval test with relative slack tol."""
        if math.isinf(self.upper):
            return True
        return self.lower <= self.upper * (1.0 + tol + ROUNDING_SLACK)

    @property
    def relative_gap(self) -> float:
        """Relative excess of lower over upper, zero for a nonempty interval."""
        if math.isinf(self.upper):
            return 0.0
        if self.upper <= 0.0:
            return math.inf if self.lower > 0.0 else 0.0
        return max(0.0, self.lower / self.upper - 1.0 - ROUNDING_SLACK)


ConditionKind = Literal[
    "drained_bound",
    "received_stationarity",
    "tendered_stationarity",
    "untouched_lower",
    "untouched_upper",
    "no_trade_interval",
    "level",
]


class ConditionResidual(BaseModel):
    """Relative residual of one optimality condition."""

    condition: ConditionKind
    index: int | None = None
    value: float = Field(..., ge=0.0)


class OptimalityReport(BaseModel):
    """
    Verification of the optimality system for a trade.

    Attributes:
        partition: Index partition of the trade
        alpha: Fitted multiplier, scaled to the raw gradient of phi
        residuals: Relative residual of each checked condition
        level_residual: Relative level constraint residual
        max_residual: Largest residual
        verdict: Verification outcome
        reference: Point at which untouched-index bounds are evaluated
        alternate_verdict: Verdict under the other reference point, when it differs
        alpha_interval: Multiplier interval used for the zero trade
        notes: Diagnostic notes
    """

    partition: IndexPartition
    alpha: float | None = None
    residuals: list[ConditionResidual] = Field(default_factory=list)
    level_residual: float = 0.0
    max_residual: float = 0.0
    verdict: Verdict
    reference: Literal["post_trade", "initial"] = "post_trade"
    alternate_verdict: Verdict | None = None
    alpha_interval: AlphaInterval | None = None
    notes: list[str] = Field(default_factory=list)

    @property
    def verified(self) -> bool:
        return self.verdict is Verdict.VERIFIED


class NoTradeReport(BaseModel):
    """Closed-form no-trade analysis of a pool and a utility."""

    prices: list[float]
    interval: AlphaInterval
    no_trade: bool
    t_intervals: dict[int, tuple[float, float]] = Field(default_factory=dict)


class OracleResult(BaseModel):
    """
    Result of the exhaustive grid search.

    Attributes:
        trade: Best grid trade
        objective: Utility of the best grid trade
        resolution: Grid spacing of the net amounts
        lipschitz_bound: Bound L on the objective change per unit of grid spacing
        grid_points: Number of grid points searched
        skipped: Grid points without a bracketed level crossing
    """

    trade: Trade
    objective: float
    resolution: float
    lipschitz_bound: float
    grid_points: int
    skipped: int


class CertificationWitness(BaseModel):
    """Pair of points witnessing a property violation."""

    a: list[float]
    b: list[float]
    gap: float


class CertificationReport(BaseModel):
    """
    Result of a sampled property certification.

    Attributes:
        property: Certified property
        trials: Trials attempted
        violations: Trials violating the property
        skipped: Trials that could not be evaluated
        max_residual: Largest residual observed
        raw_max_residual: Largest level-set residual at the sampling step before
            extrapolation; only set by the level-set certifier
        passed: No violation beyond tolerance
        witnesses: First witnesses found
    """

    property: str
    trials: int
    violations: int
    skipped: int = 0
    max_residual: float = 0.0
    raw_max_residual: float | None = None
    passed: bool
    witnesses: list[CertificationWitness] = Field(default_factory=list)


class ConvexityReport(BaseModel):
    """
    Midpoint convexity probe.

    ``convexity_violations`` counts phi(midpoint) above the chord average,
    ``concavity_violations`` counts phi(midpoint) below it.
    """

    trials: int
    convexity_violations: int
    concavity_violations: int
    convexity_witness: CertificationWitness | None = None
    concavity_witness: CertificationWitness | None = None
