"""
Exhaustive grid oracle for small pools.

Enumerates net trades of every non-numeraire asset on a uniform grid and
solves the numeraire amount from the level constraint by vectorized
bisection on the numeraire reserve. Used to audit the solver for n <= 3.
"""

import logging
import math

import numpy as np
from numpy.typing import NDArray

from src.models.market import LinearUtility, Pool, Trade
from src.models.reports import OracleResult
from src.models.solver import GridSpec, SolveResult, SolveStatus
from src.services.errors import DomainError
from src.services.market_model import level_residual, post_trade_reserves
from src.services.trade_functions import evaluator_for

logger = logging.getLogger(__name__)

MAX_DIMENSION = 3
BISECTION_STEPS = 200
INTERIOR_SHIFT = 1e-9
TIE_TOLERANCE = 1e-12


def _axis(lower: float, upper: float, resolution: float) -> NDArray[np.float64]:
    """Grid points k * resolution inside [lower, upper]; contains 0 when the range does."""
    first = math.ceil(lower / resolution - 1e-9)
    last = math.floor(upper / resolution + 1e-9)
    return resolution * np.arange(first, last + 1, dtype=np.float64)


def _numeraire_reserves(
    pool: Pool,
    partial: NDArray[np.float64],
    lo: float,
    hi: float,
) -> tuple[NDArray[np.float64], NDArray[np.bool_]]:
    """
    Numeraire reserve restoring phi(R) for each row of post-trade reserves.

    Returns:
        Numeraire reserves and a mask of rows where the crossing was bracketed
    """
    k = pool.numeraire_index
    ev = evaluator_for(pool.trade_function)
    target = float(ev.value(np.asarray(pool.reserves)))
    m = partial.shape[0]

    def level(column: NDArray[np.float64]) -> NDArray[np.float64]:
        full = partial.copy()
        full[:, k] = column
        return np.asarray(ev.value(full)) - target

    low = np.full(m, lo)
    high = np.full(m, hi)
    bracketed = (level(low) <= 0.0) & (level(high) >= 0.0)
    tolerance = 1e-15 * max(1.0, hi)
    for _ in range(BISECTION_STEPS):
        if np.all(high - low <= tolerance):
            break
        mid = 0.5 * (low + high)
        above = level(mid) >= 0.0
        high = np.where(above, mid, high)
        low = np.where(above, low, mid)
    return 0.5 * (low + high), bracketed


def lipschitz_bound(pool: Pool, utility: LinearUtility, points: list[NDArray[np.float64]]) -> float:
    """
    Bound on |dU/dz_i| along the level set at the given post-trade reserves.

    Moving z_i by one unit moves the numeraire by at most
    grad_i / (gamma_i gamma_k grad_k) units, so dU/dz_i is bounded by
    pi_i + pi_k grad_i / (gamma_i gamma_k grad_k).
    """
    k = pool.numeraire_index
    ev = evaluator_for(pool.trade_function)
    pi = np.asarray(utility.prices)
    gamma = np.asarray(pool.fees.gamma)
    bound = 0.0
    for reserves in points:
        g = ev.gradient(reserves)
        per_asset = [
            pi[i] + pi[k] * g[i] / (gamma[i] * gamma[k] * g[k])
            for i in range(pool.dimension)
            if i != k
        ]
        bound = max(bound, float(np.sum(per_asset)))
    return bound


def price_norm_bound(pool: Pool, utility: LinearUtility) -> float:
    """Coarse bound ||pi||_1 (1 + max gamma), independent of the pool state."""
    return float(np.sum(utility.prices)) * (1.0 + max(pool.fees.gamma))


def grid_search(pool: Pool, utility: LinearUtility, grid: GridSpec | None = None) -> OracleResult:
    """
    Best trade over a uniform grid of net amounts.

    Args:
        pool: Pool state with n <= 3
        utility: Linear utility of the trader
        grid: Grid specification, defaults when omitted

    Returns:
        Best grid trade; ties go to the smaller L1 norm of the net trade. The
        reported Lipschitz bound is grid.lipschitz_bound when set, otherwise
        the gradient bound at the initial and best post-trade reserves

    Raises:
        DomainError: If n > 3, the bounds are invalid or the grid is too large
    """
    grid = grid or GridSpec()
    n = pool.dimension
    if n > MAX_DIMENSION:
        raise DomainError(f"Grid oracle supports at most {MAX_DIMENSION} assets, got {n}")
    if len(utility.prices) != n:
        raise DomainError("Utility and pool dimensions differ")

    k = pool.numeraire_index
    others = [i for i in range(n) if i != k]
    reserves = np.asarray(pool.reserves, dtype=np.float64)
    gamma = np.asarray(pool.fees.gamma, dtype=np.float64)
    pi = np.asarray(utility.prices, dtype=np.float64)
    floor = INTERIOR_SHIFT * float(reserves.min())
    cap = grid.y_cap_factor * reserves

    axes = []
    for position, i in enumerate(others):
        lo = -cap[i] if grid.lower is None else grid.lower[position]
        hi = reserves[i] - floor if grid.upper is None else grid.upper[position]
        lo, hi = max(lo, -cap[i]), min(hi, reserves[i] - floor)
        if lo > hi:
            raise DomainError(f"Empty grid range for asset {i}: [{lo}, {hi}]")
        axes.append(_axis(lo, hi, grid.resolution))

    size = math.prod(len(axis) for axis in axes)
    if size > grid.max_points:
        raise DomainError(f"Grid has {size} points, more than the limit {grid.max_points}")
    logger.info(f"Grid oracle searching {size} points at resolution {grid.resolution:g}")

    if axes:
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(others))
    else:
        mesh = np.zeros((1, 0))
    received = np.maximum(mesh, 0.0)
    tendered = np.maximum(-mesh, 0.0)

    partial = np.tile(reserves, (mesh.shape[0], 1))
    partial[:, others] = reserves[others] - received + gamma[others] * tendered
    numeraire_reserve, bracketed = _numeraire_reserves(
        pool, partial, floor, reserves[k] + gamma[k] * cap[k]
    )
    net_numeraire = np.where(
        numeraire_reserve <= reserves[k],
        reserves[k] - numeraire_reserve,
        -(numeraire_reserve - reserves[k]) / gamma[k],
    )
    # bisection noise around the untouched numeraire
    net_numeraire[np.abs(net_numeraire) <= 1e-12 * max(1.0, reserves[k])] = 0.0

    objective = mesh @ pi[others] + pi[k] * net_numeraire
    skipped = int(np.count_nonzero(~bracketed))
    if skipped:
        logger.info(f"Grid oracle skipped {skipped} points without a bracketed level crossing")
    if not np.any(bracketed):
        raise DomainError("No grid point satisfies the level constraint")

    objective = np.where(bracketed, objective, -np.inf)
    best_value = float(objective.max())
    ties = np.flatnonzero(objective >= best_value - TIE_TOLERANCE * max(1.0, abs(best_value)))
    l1 = np.abs(mesh[ties]).sum(axis=1) + np.abs(net_numeraire[ties])
    best = int(ties[np.argmin(l1)])

    net = np.zeros(n)
    net[others] = mesh[best]
    net[k] = net_numeraire[best]
    trade = Trade.from_net(net.tolist())
    after = partial[best].copy()
    after[k] = numeraire_reserve[best]

    return OracleResult(
        trade=trade,
        objective=float(objective[best]),
        resolution=grid.resolution,
        lipschitz_bound=(
            grid.lipschitz_bound
            if grid.lipschitz_bound is not None
            else lipschitz_bound(pool, utility, [reserves, after])
        ),
        grid_points=size,
        skipped=skipped,
    )


def grid_solve(pool: Pool, utility: LinearUtility, grid: GridSpec | None = None) -> SolveResult:
    """
    Grid optimum in the solver's result shape, for side-by-side comparison.

    The grid point count is reported as ``iterations``.
    """
    result = grid_search(pool, utility, grid)
    residual = level_residual(pool, post_trade_reserves(pool, result.trade))
    return SolveResult(
        trade=result.trade,
        objective=result.objective,
        constraint_residual=residual,
        status=SolveStatus.CONVERGED,
        iterations=result.grid_points,
        starts_used=1,
    )
