"""
API endpoints for sampled certification of trade function properties.
"""

import asyncio
import logging

from fastapi import APIRouter, HTTPException, status

from src.models import CertificationReport, CertificationRequest, ConvexityReport
from src.services import CFMMError
from src.services.trade_functions import (
    certify_monotone,
    certify_quasilinear_level_set,
    probe_convexity,
)

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/certification", tags=["certification"])


def _failed(e: CFMMError) -> HTTPException:
    return HTTPException(
        status_code=status.HTTP_400_BAD_REQUEST,
        detail={"message": "Certification failed", "errors": [str(e)]},
    )


@router.post("/monotone", response_model=CertificationReport, summary="Certify monotonicity")
async def monotone(request: CertificationRequest) -> CertificationReport:
    try:
        return await asyncio.to_thread(
            certify_monotone, request.trade_function, request.trials, request.seed, request.box
        )
    except CFMMError as e:
        raise _failed(e) from e


@router.post(
    "/quasilinear",
    response_model=CertificationReport,
    summary="Certify the level-set characterization",
)
async def quasilinear(request: CertificationRequest) -> CertificationReport:
    try:
        return await asyncio.to_thread(
            certify_quasilinear_level_set,
            request.trade_function,
            request.trials,
            request.seed,
            1e-6,
            request.box,
        )
    except CFMMError as e:
        raise _failed(e) from e


@router.post("/convexity", response_model=ConvexityReport, summary="Probe convexity")
async def convexity(request: CertificationRequest) -> ConvexityReport:
    try:
        return await asyncio.to_thread(
            probe_convexity, request.trade_function, request.trials, request.seed, request.box
        )
    except CFMMError as e:
        raise _failed(e) from e
