"""
CFMM Models Package

Pydantic models for constant function market makers: trade functions, pools,
trades and utilities, solver options and results, verification reports and
experiment configuration. Also holds the request/response models of the REST API.
"""

from pydantic import BaseModel, Field

from .experiment import (
    ExperimentConfig,
    OutputSpec,
    PriceTable,
    SweepResult,
    SweepRow,
    SweepSpec,
)
from .market import (
    FeasibilityReport,
    FeasibilityViolation,
    FeeSchedule,
    LinearUtility,
    Pool,
    Trade,
)
from .reports import (
    AlphaInterval,
    CertificationReport,
    CertificationWitness,
    ConditionResidual,
    ConvexityReport,
    IndexPartition,
    NoTradeReport,
    OptimalityReport,
    OracleResult,
    Verdict,
)
from .solver import GridSpec, SolveResult, SolverMethod, SolverOptions, SolveStatus
from .trade_function import (
    GeneratorKind,
    MeanGenerator,
    TradeFunction,
    TradeFunctionKind,
    WeightVector,
)


# API Request/Response Models for FastAPI endpoints
class PriceRequest(BaseModel):
    """Request model for marginal prices."""

    pool: Pool = Field(..., description="Pool state")


class PriceResponse(BaseModel):
    """Response model for marginal prices."""

    numeraire: int = Field(..., description="Numeraire index")
    prices: list[float] = Field(..., description="Marginal prices, numeraire price 1")
    trade_function_value: float = Field(..., description="phi(R)")


class SolveRequest(BaseModel):
    """Request model for an optimal-trade solve."""

    pool: Pool
    utility: LinearUtility
    options: SolverOptions = Field(default_factory=SolverOptions)


class VerifyRequest(BaseModel):
    """Request model for optimality verification of a trade."""

    pool: Pool
    utility: LinearUtility
    trade: Trade
    tol: float = Field(default=1e-5, gt=0.0)
    reference: str = Field(default="post_trade", pattern="^(post_trade|initial)$")


class NoTradeRequest(BaseModel):
    """Request model for the closed-form no-trade test."""

    pool: Pool
    utility: LinearUtility
    tol: float = Field(default=0.0, ge=0.0)


class OracleRequest(BaseModel):
    """Request model for the exhaustive grid search."""

    pool: Pool
    utility: LinearUtility
    grid: GridSpec = Field(default_factory=lambda: GridSpec(resolution=1e-2))


class CertificationRequest(BaseModel):
    """Request model for sampled property certification."""

    trade_function: TradeFunction
    trials: int = Field(default=1000, ge=1, le=100_000)
    seed: int = Field(default=0)
    box: tuple[float, float] = Field(default=(0.01, 50.0))


__all__ = [
    "AlphaInterval",
    "CertificationReport",
    "CertificationRequest",
    "CertificationWitness",
    "ConditionResidual",
    "ConvexityReport",
    "ExperimentConfig",
    "FeasibilityReport",
    "FeasibilityViolation",
    "FeeSchedule",
    "GeneratorKind",
    "GridSpec",
    "IndexPartition",
    "LinearUtility",
    "MeanGenerator",
    "NoTradeReport",
    "NoTradeRequest",
    "OptimalityReport",
    "OracleRequest",
    "OracleResult",
    "OutputSpec",
    "Pool",
    "PriceRequest",
    "PriceResponse",
    "PriceTable",
    "SolveRequest",
    "SolveResult",
    "SolveStatus",
    "SolverMethod",
    "SolverOptions",
    "SweepResult",
    "SweepRow",
    "SweepSpec",
    "Trade",
    "TradeFunction",
    "TradeFunctionKind",
    "Verdict",
    "VerifyRequest",
    "WeightVector",
]
