"""
Market model: post-trade reserves, trade utility and feasibility.
"""

import logging

import numpy as np
from numpy.typing import NDArray

from src.models.market import (
    FeasibilityReport,
    FeasibilityViolation,
    LinearUtility,
    Pool,
    Trade,
)
from src.services.errors import DomainError
from src.services.trade_functions import evaluate

logger = logging.getLogger(__name__)


def _check_dimension(pool: Pool, trade: Trade) -> None:
    if trade.dimension != pool.dimension:
        raise DomainError(
            f"Trade has {trade.dimension} components for a pool of {pool.dimension} assets"
        )


def post_trade_reserves(pool: Pool, trade: Trade) -> NDArray[np.float64]:
    """Reserves after the trade, R + Gamma y - x."""
    _check_dimension(pool, trade)
    reserves = np.asarray(pool.reserves, dtype=np.float64)
    gamma = np.asarray(pool.fees.gamma, dtype=np.float64)
    return reserves + gamma * np.asarray(trade.y) - np.asarray(trade.x)


def utility_of(utility: LinearUtility, trade: Trade) -> float:
    """Utility pi . (x - y) of a trade."""
    if len(utility.prices) != trade.dimension:
        raise DomainError("Utility and trade dimensions differ")
    return utility.value(trade.net)


def complementarity_violation(trade: Trade) -> float:
    """Largest amount both received and tendered, max_i min(x_i, y_i)."""
    return max(0.0, *(min(xi, yi) for xi, yi in zip(trade.x, trade.y, strict=True)))


def level_residual(pool: Pool, reserves_after: NDArray[np.float64]) -> float:
    """Relative level constraint residual |phi(R') - phi(R)| / max(1, |phi(R)|)."""
    phi_initial = evaluate(pool.trade_function, pool.reserves)
    phi_after = evaluate(pool.trade_function, reserves_after)
    return abs(phi_after - phi_initial) / max(1.0, abs(phi_initial))


def is_feasible(pool: Pool, trade: Trade, tol: float = 1e-9) -> FeasibilityReport:
    """
    Check a trade against the constraints of the optimal-trade problem.

    Conditions: x >= 0, y >= 0, x <= R, post-trade reserves >= 0 and
    phi(R') = phi(R) within relative tolerance tol. When phi is undefined at
    the post-trade reserves (a drained asset under the geometric mean) the
    level condition is reported as violated.

    Args:
        pool: Pool state
        trade: Trade to check
        tol: Tolerance, absolute for bounds scaled by max(1, R_i), relative for the level

    Returns:
        Feasibility report listing every violated condition
    """
    _check_dimension(pool, trade)
    violations: list[FeasibilityViolation] = []
    reserves = np.asarray(pool.reserves)
    x = np.asarray(trade.x)
    y = np.asarray(trade.y)
    after = post_trade_reserves(pool, trade)

    for i in range(pool.dimension):
        scale = max(1.0, float(reserves[i]))
        if x[i] < -tol * scale:
            violations.append(FeasibilityViolation(kind="negative_x", index=i, magnitude=-x[i]))
        if y[i] < -tol * scale:
            violations.append(FeasibilityViolation(kind="negative_y", index=i, magnitude=-y[i]))
        if x[i] > reserves[i] + tol * scale:
            violations.append(
                FeasibilityViolation(kind="x_exceeds_reserve", index=i, magnitude=x[i] - reserves[i])
            )
        if after[i] < -tol * scale:
            violations.append(
                FeasibilityViolation(kind="negative_reserve", index=i, magnitude=-after[i])
            )

    try:
        residual = level_residual(pool, np.maximum(after, 0.0))
    except DomainError as e:
        logger.debug(f"Level undefined at post-trade reserves: {e}")
        residual = float("inf")
    if residual > tol:
        violations.append(FeasibilityViolation(kind="level", magnitude=residual))

    return FeasibilityReport(
        feasible=not violations,
        violations=violations,
        level_residual=residual,
    )
