"""
FastAPI routers for the CFMM optimal-trade toolkit.
"""

from .certification import router as certification_router
from .pricing import router as pricing_router
from .trading import router as trading_router

__all__ = ["certification_router", "pricing_router", "trading_router"]
