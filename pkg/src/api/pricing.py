"""
API endpoints for marginal prices.
"""

import asyncio
import logging

from fastapi import APIRouter, HTTPException, status

from src.models import PriceRequest, PriceResponse
from src.services import CFMMError
from src.services.trade_functions import evaluate, prices

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/pricing", tags=["pricing"])


@router.post(
    "/prices",
    response_model=PriceResponse,
    status_code=status.HTTP_200_OK,
    summary="Marginal prices",
    description="Marginal prices of a pool relative to its numeraire",
)
async def get_prices(request: PriceRequest) -> PriceResponse:
    """
    Compute the marginal prices of a pool.

    Args:
        request: Pool state

    Returns:
        PriceResponse with the price vector and phi(R)

    Raises:
        HTTPException: 400 if the pool is outside the domain of phi
    """
    pool = request.pool
    logger.info(f"Received price request for a {pool.dimension}-asset pool")
    try:
        p = await asyncio.to_thread(
            prices, pool.trade_function, pool.reserves, pool.numeraire_index
        )
        value = evaluate(pool.trade_function, pool.reserves)
    except CFMMError as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail={"message": "Price computation failed", "errors": [str(e)]},
        ) from e
    return PriceResponse(
        numeraire=pool.numeraire_index,
        prices=p.tolist(),
        trade_function_value=value,
    )
