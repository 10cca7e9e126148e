"""
Optimality verification.

Checks the first-order optimality system of the optimal-trade problem for a
candidate trade. Indices are partitioned into drained, received, tendered and
untouched sets; a single multiplier alpha is fitted from the equality rows
and every condition is reported as a relative residual. The zero trade is
decided by the closed-form multiplier interval so that the verdict agrees
with ``notrade.in_no_trade_region`` exactly.
"""

import logging
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from src.models.market import LinearUtility, Pool, Trade
from src.models.reports import (
    ConditionResidual,
    IndexPartition,
    OptimalityReport,
    Verdict,
)
from src.services.errors import DomainError, NotComplementary
from src.services.market_model import (
    complementarity_violation,
    level_residual,
    post_trade_reserves,
)
from src.services.notrade import alpha_interval
from src.services.trade_functions import gradient

logger = logging.getLogger(__name__)

# Relative distance to R_i under which a receive amount counts as draining the asset.
DRAIN_TOLERANCE = 1e-7

Reference = Literal["post_trade", "initial"]


def classify_indices(pool: Pool, trade: Trade, tol: float = 1e-9) -> IndexPartition:
    """
    Partition asset indices by trade pattern.

    Amounts at most tol count as zero; a receive amount within a relative
    1e-7 of the reserve counts as draining the asset.

    Raises:
        NotComplementary: If some asset is both received and tendered beyond tol
    """
    violation = complementarity_violation(trade)
    if violation > tol:
        raise NotComplementary(f"Trade receives and tenders the same asset by {violation!r}")

    partition = IndexPartition()
    for i, (x_i, y_i, r_i) in enumerate(zip(trade.x, trade.y, pool.reserves, strict=True)):
        if x_i >= r_i * (1.0 - DRAIN_TOLERANCE):
            partition.drained.append(i)
        elif x_i > tol:
            partition.received.append(i)
        elif y_i > tol:
            partition.tendered.append(i)
        else:
            partition.untouched.append(i)
    return partition


def _relative(excess: float, a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    if scale == 0.0:
        return 0.0
    return max(0.0, excess) / scale


def fit_alpha(
    partition: IndexPartition,
    pi: NDArray[np.float64],
    grad_after: NDArray[np.float64],
    gamma: NDArray[np.float64],
) -> float:
    """
    Least-squares multiplier of the equality rows, weighted by 1 / a_i^2.

    Rows pi_i = alpha a_i with a_i = grad_i on received indices and
    gamma_i grad_i on tendered ones; the weighted fit is the mean of pi_i / a_i.
    """
    ratios = [pi[i] / grad_after[i] for i in partition.received]
    ratios += [pi[i] / (gamma[i] * grad_after[i]) for i in partition.tendered]
    if not ratios:
        raise DomainError("No equality rows to fit alpha from")
    return float(np.mean(ratios))


def _untouched_residuals(
    partition: IndexPartition,
    alpha: float,
    pi: NDArray[np.float64],
    q: NDArray[np.float64],
    gamma: NDArray[np.float64],
) -> list[ConditionResidual]:
    residuals = []
    for i in partition.untouched:
        upper = alpha * q[i]
        lower = gamma[i] * upper
        residuals.append(
            ConditionResidual(
                condition="untouched_lower",
                index=i,
                value=_relative(lower - pi[i], pi[i], upper),
            )
        )
        residuals.append(
            ConditionResidual(
                condition="untouched_upper",
                index=i,
                value=_relative(pi[i] - upper, pi[i], upper),
            )
        )
    return residuals


def _verdict(residuals: list[ConditionResidual], alpha: float | None, tol: float) -> Verdict:
    if alpha is None or alpha < 0.0:
        return Verdict.VIOLATED
    if all(r.value <= tol for r in residuals):
        return Verdict.VERIFIED
    return Verdict.VIOLATED


def _verify_zero_trade(
    pool: Pool,
    utility: LinearUtility,
    tol: float,
    partition: IndexPartition,
    after: NDArray[np.float64],
    level: float,
) -> OptimalityReport:
    grad_after = gradient(pool.trade_function, after)
    k = pool.numeraire_index
    p = grad_after / grad_after[k]
    p[k] = 1.0
    interval = alpha_interval(p, utility.gradient(), pool.fees)
    nonempty = interval.is_nonempty(tol)
    # alpha relative to normalized prices, rescaled to the raw gradient
    alpha = interval.lower / grad_after[k]

    residuals = [
        ConditionResidual(condition="no_trade_interval", value=interval.relative_gap),
        ConditionResidual(condition="level", value=level),
    ]
    verified = nonempty and level <= tol
    report = OptimalityReport(
        partition=partition,
        alpha=alpha,
        residuals=residuals,
        level_residual=level,
        max_residual=max(r.value for r in residuals),
        verdict=Verdict.VERIFIED if verified else Verdict.VIOLATED,
        alpha_interval=interval,
        notes=["zero trade decided by the multiplier interval"],
    )
    return report


def verify_system(
    pool: Pool,
    utility: LinearUtility,
    trade: Trade,
    tol: float = 1e-5,
    reference: Reference = "post_trade",
) -> OptimalityReport:
    """
    Verify the first-order optimality system for a trade.

    Conditions, with P' = grad phi at the post-trade reserves:
        drained:   pi_i >= alpha P'_i
        received:  pi_i = alpha P'_i
        tendered:  pi_i = alpha gamma_i P'_i
        untouched: alpha gamma_i Q_i <= pi_i <= alpha Q_i
        level:     phi(R') = phi(R)
    Q is P' by default; ``reference="initial"`` evaluates Q at the initial
    reserves instead. When the two references disagree the other verdict is
    reported in ``alternate_verdict``.

    Args:
        pool: Pool state
        utility: Linear utility of the trader
        trade: Candidate trade
        tol: Tolerance on every relative residual
        reference: Point at which untouched-index bounds are evaluated

    Returns:
        Optimality report

    Raises:
        NotComplementary: If the trade is not complementary within tol
    """
    partition = classify_indices(pool, trade, tol)
    after = post_trade_reserves(pool, trade)
    pi = np.asarray(utility.gradient(trade.net), dtype=np.float64)
    gamma = np.asarray(pool.fees.gamma, dtype=np.float64)

    try:
        level = level_residual(pool, after)
        grad_after = gradient(pool.trade_function, after)
    except DomainError as e:
        logger.info(f"Optimality system not applicable: {e}")
        return OptimalityReport(
            partition=partition,
            verdict=Verdict.NOT_APPLICABLE,
            reference=reference,
            notes=[f"phi not differentiable at post-trade reserves: {e}"],
        )

    if not partition.has_equality_rows and not partition.drained:
        report = _verify_zero_trade(pool, utility, tol, partition, after, level)
        return report.model_copy(update={"reference": reference})

    residuals: list[ConditionResidual] = []
    notes: list[str] = []
    if partition.has_equality_rows:
        alpha = fit_alpha(partition, pi, grad_after, gamma)
    else:
        # Only drained and untouched indices: the smallest alpha meeting every upper bound.
        alpha = max(pi[i] / grad_after[i] for i in partition.untouched) if partition.untouched else 0.0
        notes.append("alpha chosen at the lower end of the untouched-index interval")

    for i in partition.drained:
        bound = alpha * grad_after[i]
        residuals.append(
            ConditionResidual(
                condition="drained_bound", index=i, value=_relative(bound - pi[i], pi[i], bound)
            )
        )
    for i in partition.received:
        a = alpha * grad_after[i]
        residuals.append(
            ConditionResidual(
                condition="received_stationarity", index=i, value=_relative(abs(pi[i] - a), pi[i], a)
            )
        )
    for i in partition.tendered:
        a = alpha * gamma[i] * grad_after[i]
        residuals.append(
            ConditionResidual(
                condition="tendered_stationarity", index=i, value=_relative(abs(pi[i] - a), pi[i], a)
            )
        )
    residuals.append(ConditionResidual(condition="level", value=level))

    grad_initial = gradient(pool.trade_function, pool.reserves)
    q_main, q_other = (grad_after, grad_initial) if reference == "post_trade" else (grad_initial, grad_after)
    main = residuals + _untouched_residuals(partition, alpha, pi, q_main, gamma)
    other = residuals + _untouched_residuals(partition, alpha, pi, q_other, gamma)

    verdict = _verdict(main, alpha, tol)
    alternate = _verdict(other, alpha, tol)
    if alternate is not verdict:
        logger.info(f"Verdict {verdict.value} flips to {alternate.value} under the other reference")

    return OptimalityReport(
        partition=partition,
        alpha=alpha,
        residuals=main,
        level_residual=level,
        max_residual=max(r.value for r in main),
        verdict=verdict,
        reference=reference,
        alternate_verdict=alternate if alternate is not verdict else None,
        notes=notes,
    )
