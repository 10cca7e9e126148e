"""
API endpoints for optimal trades, verification, no-trade analysis and the grid oracle.

Numerical work runs in a worker thread so the event loop stays responsive.
"""

import asyncio
import logging

from fastapi import APIRouter, HTTPException, status

from src.models import (
    NoTradeReport,
    NoTradeRequest,
    OptimalityReport,
    OracleRequest,
    OracleResult,
    SolveRequest,
    SolveResult,
    VerifyRequest,
)
from src.services import CFMMError, DomainError, NotComplementary
from src.services import notrade, optimality, oracle, solver

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/trading", tags=["trading"])


def _bad_request(message: str, error: Exception) -> HTTPException:
    return HTTPException(
        status_code=status.HTTP_400_BAD_REQUEST,
        detail={"message": message, "errors": [str(error)]},
    )


@router.post(
    "/solve",
    response_model=SolveResult,
    summary="Solve for the optimal trade",
    description="Maximize a linear utility subject to the pool's level constraint",
)
async def solve_trade(request: SolveRequest) -> SolveResult:
    """
    Solve the optimal-trade problem.

    Raises:
        HTTPException: 400 on domain errors, 500 on solver failures
    """
    logger.info(f"Received solve request for a {request.pool.dimension}-asset pool")
    try:
        return await asyncio.to_thread(solver.solve, request.pool, request.utility, request.options)
    except DomainError as e:
        raise _bad_request("Invalid optimal-trade problem", e) from e
    except CFMMError as e:
        logger.error(f"Solver failed: {e}", exc_info=True)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail={"message": "Solver failed", "errors": [str(e)]},
        ) from e


@router.post(
    "/verify",
    response_model=OptimalityReport,
    summary="Verify optimality of a trade",
    description="Check the first-order optimality system for a candidate trade",
)
async def verify_trade(request: VerifyRequest) -> OptimalityReport:
    """
    Verify a candidate trade.

    Raises:
        HTTPException: 400 if the trade is not complementary or outside the domain
    """
    try:
        return await asyncio.to_thread(
            optimality.verify_system,
            request.pool,
            request.utility,
            request.trade,
            request.tol,
            request.reference,  # type: ignore[arg-type]
        )
    except NotComplementary as e:
        raise _bad_request("Trade is not complementary", e) from e
    except DomainError as e:
        raise _bad_request("Invalid verification request", e) from e


@router.post(
    "/notrade",
    response_model=NoTradeReport,
    summary="No-trade test",
    description="Closed-form test whether the zero trade is optimal",
)
async def no_trade(request: NoTradeRequest) -> NoTradeReport:
    """Closed-form no-trade verdict with per-asset scaling intervals."""
    try:
        return await asyncio.to_thread(notrade.analyze, request.pool, request.utility, request.tol)
    except CFMMError as e:
        raise _bad_request("No-trade analysis failed", e) from e


@router.post(
    "/oracle",
    response_model=OracleResult,
    summary="Exhaustive grid search",
    description="Best trade over a grid of net amounts, for pools of at most three assets",
)
async def grid_oracle(request: OracleRequest) -> OracleResult:
    """
    Run the grid oracle.

    Raises:
        HTTPException: 400 if the pool is too large or the grid is invalid
    """
    try:
        return await asyncio.to_thread(oracle.grid_search, request.pool, request.utility, request.grid)
    except CFMMError as e:
        raise _bad_request("Grid search failed", e) from e
