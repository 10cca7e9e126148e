"""
Closed-form no-trade region.

The zero trade is optimal exactly when some alpha satisfies
gamma_i alpha p_i <= pi_i <= alpha p_i for every asset, i.e. when
max_i pi_i / p_i <= min_i pi_i / (gamma_i p_i).
"""

import logging
import math

import numpy as np
from numpy.typing import ArrayLike

from src.models.market import FeeSchedule, LinearUtility, Pool
from src.models.reports import ROUNDING_SLACK, AlphaInterval, NoTradeReport
from src.services.errors import DomainError
from src.services.trade_functions import prices

logger = logging.getLogger(__name__)


def alpha_interval(p: ArrayLike, pi: ArrayLike, fees: FeeSchedule | ArrayLike) -> AlphaInterval:
    """
    Interval [max pi_i / p_i, min pi_i / (gamma_i p_i)] of admissible multipliers.

    Args:
        p: Strictly positive marginal prices
        pi: Nonnegative utility prices, not all zero
        fees: Fee schedule or fee factors

    Raises:
        DomainError: On nonpositive prices, invalid utility prices or a dimension mismatch
    """
    p = np.asarray(p, dtype=np.float64)
    pi = np.asarray(pi, dtype=np.float64)
    gamma = np.asarray(fees.gamma if isinstance(fees, FeeSchedule) else fees, dtype=np.float64)
    if not p.shape == pi.shape == gamma.shape:
        raise DomainError("Prices, utility prices and fees must have the same length")
    if np.any(p <= 0.0):
        raise DomainError("Marginal prices must be strictly positive")
    if np.any(pi < 0.0) or not np.any(pi > 0.0):
        raise DomainError("Utility prices must be nonnegative and not all zero")

    lower = 0.0
    upper = math.inf
    for p_i, pi_i, g_i in zip(p, pi, gamma, strict=True):
        lower = max(lower, float(pi_i / p_i))
        upper = min(upper, float(pi_i / (g_i * p_i)))
    return AlphaInterval(lower=lower, upper=upper)


def in_no_trade_region(pool: Pool, utility: LinearUtility, tol: float = 0.0) -> bool:
    """
    Whether the zero trade is optimal for the utility.

    The interval test is closed with relative slack tol: lower <= upper * (1 + tol).
    """
    p = prices(pool.trade_function, pool.reserves, pool.numeraire_index)
    return alpha_interval(p, utility.gradient(), pool.fees).is_nonempty(tol)


def no_trade_t_interval(
    pool: Pool,
    base_pi: ArrayLike,
    perturbed_index: int,
) -> tuple[float, float]:
    """
    Scaling factors t for which pi(t) = base_pi with component i scaled by t lies in the region.

    With base_pi equal to the marginal prices this is
    [gamma_i, min_{j != i} 1 / gamma_j], i.e. [gamma, 1 / gamma] for uniform fees.

    Args:
        pool: Pool state
        base_pi: Utility prices before scaling
        perturbed_index: Index i of the scaled component

    Returns:
        (lower, upper); lower > upper when no factor works

    Raises:
        DomainError: If the index is out of range or base_pi[i] is not positive
    """
    n = pool.dimension
    if not 0 <= perturbed_index < n:
        raise DomainError(f"Perturbed index {perturbed_index} out of range for {n} assets")
    base = np.asarray(base_pi, dtype=np.float64)
    if not base[perturbed_index] > 0.0:
        raise DomainError("Perturbed utility price must be strictly positive")
    p = prices(pool.trade_function, pool.reserves, pool.numeraire_index)
    gamma = np.asarray(pool.fees.gamma)

    ratios = base / p
    others = [j for j in range(n) if j != perturbed_index]
    lower_others = max((ratios[j] for j in others), default=0.0)
    upper_others = min((ratios[j] / gamma[j] for j in others), default=math.inf)
    r_i = ratios[perturbed_index]
    g_i = gamma[perturbed_index]

    if lower_others > upper_others * (1.0 + ROUNDING_SLACK):
        logger.info("Unperturbed components already leave the no-trade region")
        return math.inf, -math.inf
    return float(g_i * lower_others / r_i), float(upper_others / r_i)


def analyze(pool: Pool, utility: LinearUtility, tol: float = 0.0) -> NoTradeReport:
    """No-trade verdict with the scaling intervals of every asset."""
    p = prices(pool.trade_function, pool.reserves, pool.numeraire_index)
    interval = alpha_interval(p, utility.prices, pool.fees)
    t_intervals = {
        i: no_trade_t_interval(pool, p, i) for i in range(pool.dimension)
    }
    return NoTradeReport(
        prices=p.tolist(),
        interval=interval,
        no_trade=interval.is_nonempty(tol),
        t_intervals=t_intervals,
    )
