"""
Optimal-trade solver.

Maximizes pi . (x - y) over trades (x, y) subject to
phi(R + Gamma y - x) = phi(R), 0 <= x <= R - eps and 0 <= y <= y_cap.

The default backend is an augmented Lagrangian on the level constraint whose
bound-constrained subproblems are solved by a spectral projected gradient
method with a nonmonotone line search. Every start is post-processed by
restoring the level constraint exactly on the numeraire coordinate and by
removing simultaneous receive/tender amounts. The best feasible result over
all starts is returned; ties go to the smaller trade.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import optimize

from src.models.market import LinearUtility, Pool, Trade
from src.models.solver import SolveResult, SolverMethod, SolverOptions, SolveStatus
from src.services.errors import DomainError, NoBracket, RootFindError
from src.services.trade_functions import evaluator_for

logger = logging.getLogger(__name__)

NONMONOTONE_MEMORY = 10
ARMIJO = 1e-4
STEP_BOUNDS = (1e-12, 1e12)
MAX_PENALTY = 1e12
TIE_TOLERANCE = 1e-12
RECEIVE_START = 0.9
TENDER_START = 1.0


class TradeProblem:
    """Optimal-trade problem over the stacked variable v = (x, y)."""

    def __init__(self, pool: Pool, utility: LinearUtility, options: SolverOptions):
        if len(utility.prices) != pool.dimension:
            raise DomainError(
                f"Utility has {len(utility.prices)} prices for a pool of {pool.dimension} assets"
            )
        self.pool = pool
        self.options = options
        self.n = pool.dimension
        self.numeraire = pool.numeraire_index
        self.reserves = np.asarray(pool.reserves, dtype=np.float64)
        self.gamma = np.asarray(pool.fees.gamma, dtype=np.float64)
        self.pi = np.asarray(utility.prices, dtype=np.float64)
        self.evaluator = evaluator_for(pool.trade_function)
        self.phi_initial = float(self.evaluator.value(self.reserves))
        self.scale = max(1.0, abs(self.phi_initial))
        self.floor = options.interior_shift * float(self.reserves.min())
        self.cap = options.y_cap_factor * self.reserves
        self.lower = np.zeros(2 * self.n)
        self.upper = np.concatenate([self.reserves - self.floor, self.cap])
        self.objective_gradient = np.concatenate([-self.pi, self.pi])

    def split(self, v: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        return v[: self.n], v[self.n :]

    def project(self, v: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.clip(v, self.lower, self.upper)

    def reserves_after(self, v: NDArray[np.float64]) -> NDArray[np.float64]:
        x, y = self.split(v)
        return self.reserves + self.gamma * y - x

    def utility(self, v: NDArray[np.float64]) -> float:
        x, y = self.split(v)
        return float(self.pi @ (x - y))

    def constraint(self, v: NDArray[np.float64]) -> float:
        """Scaled level residual (phi(R') - phi(R)) / max(1, |phi(R)|)."""
        return (float(self.evaluator.value(self.reserves_after(v))) - self.phi_initial) / self.scale

    def constraint_gradient(self, v: NDArray[np.float64]) -> NDArray[np.float64]:
        g = self.evaluator.gradient(self.reserves_after(v)) / self.scale
        return np.concatenate([-g, self.gamma * g])

    def initial_multiplier(self, v: NDArray[np.float64]) -> float:
        """
        Multiplier estimate at v, the middle of the no-trade interval of the local prices.

        At the zero trade inside the no-trade region this makes the zero trade
        an exact stationary point of the first subproblem.
        """
        g = self.evaluator.gradient(self.reserves_after(v))
        lower = float(np.max(self.pi / g))
        upper = float(np.min(self.pi / (self.gamma * g)))
        return 0.5 * (lower + upper) * self.scale

    def cap_active(self, y: NDArray[np.float64]) -> list[int]:
        return [int(i) for i in np.flatnonzero(y >= self.cap * (1.0 - 1e-9))]


@dataclass
class StartOutcome:
    """Post-processed result of one start."""

    start: int
    x: NDArray[np.float64]
    y: NDArray[np.float64]
    objective: float
    residual: float
    converged: bool
    iterations: int
    multiplier: float | None
    cleanup_rejected: bool

    @property
    def size(self) -> float:
        return float(np.abs(self.x).sum() + np.abs(self.y).sum())


def _set_numeraire_contribution(
    problem: TradeProblem,
    x: NDArray[np.float64],
    y: NDArray[np.float64],
    contribution: float,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Trade whose numeraire entries add ``contribution`` to the numeraire reserve."""
    k = problem.numeraire
    x, y = x.copy(), y.copy()
    if contribution >= 0.0:
        x[k], y[k] = 0.0, contribution / problem.gamma[k]
    else:
        x[k], y[k] = -contribution, 0.0
    return x, y


def _restore(
    problem: TradeProblem,
    x: NDArray[np.float64],
    y: NDArray[np.float64],
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Restore phi(R') = phi(R) by a scalar correction of the numeraire reserve.

    Raises:
        NoBracket: If no numeraire amount restores the level
    """
    k = problem.numeraire
    after = problem.reserves + problem.gamma * y - x
    ev = problem.evaluator

    def level(delta: float) -> float:
        shifted = after.copy()
        shifted[k] += delta
        return float(ev.value(shifted)) - problem.phi_initial

    base = level(0.0)
    if base == 0.0:
        return x, y
    lo = problem.floor - after[k]
    if level(lo) > 0.0:
        raise NoBracket("Level exceeds phi(R) even with the numeraire drained")
    hi = max(abs(base) / max(float(ev.gradient(after)[k]), 1e-300), 1e-12 * problem.reserves[k])
    for _ in range(200):
        if level(hi) >= 0.0:
            break
        hi *= 2.0
    else:
        raise NoBracket("Level constraint not bracketed on the numeraire coordinate")
    if base > 0.0:
        hi = 0.0
    else:
        lo = 0.0
    delta = float(
        optimize.brentq(level, lo, hi, xtol=1e-15 * max(1.0, problem.reserves[k]), rtol=4 * np.finfo(float).eps)
    )
    contribution = problem.gamma[k] * y[k] - x[k] + delta
    return _set_numeraire_contribution(problem, x, y, contribution)


def restore_level(pool: Pool, trade: Trade, interior_shift: float = 1e-9) -> Trade:
    """
    Adjust the numeraire entries of a trade so that the level constraint holds exactly.

    Raises:
        NoBracket: If no numeraire amount restores the level
    """
    problem = TradeProblem(
        pool,
        LinearUtility(prices=tuple([1.0] * pool.dimension)),
        SolverOptions(interior_shift=interior_shift),
    )
    x, y = _restore(problem, np.asarray(trade.x, dtype=np.float64), np.asarray(trade.y, dtype=np.float64))
    return Trade(x=tuple(x.tolist()), y=tuple(y.tolist()))


def _cleanup(
    problem: TradeProblem,
    x: NDArray[np.float64],
    y: NDArray[np.float64],
) -> tuple[NDArray[np.float64], NDArray[np.float64], bool]:
    """
    Remove min(x_i, y_i) from both sides and restore the level on the numeraire.

    Returns the raw trade with the rejection flag set when the cleaned trade
    cannot be restored or lowers the objective.
    """
    overlap = np.minimum(x, y)
    if not np.any(overlap > 0.0):
        return x, y, False
    cleaned_x, cleaned_y = x - overlap, y - overlap
    try:
        cleaned_x, cleaned_y = _restore(problem, cleaned_x, cleaned_y)
    except RootFindError as e:
        logger.warning(f"Complementarity cleanup rejected: {e}")
        return x, y, True
    before = problem.utility(np.concatenate([x, y]))
    after = problem.utility(np.concatenate([cleaned_x, cleaned_y]))
    if after < before - TIE_TOLERANCE * max(1.0, abs(before)):
        logger.warning(f"Complementarity cleanup rejected: objective {before!r} -> {after!r}")
        return x, y, True
    return cleaned_x, cleaned_y, False


def _projected_gradient(
    problem: TradeProblem,
    v: NDArray[np.float64],
    multiplier: float,
    penalty: float,
    tol: float,
    max_iterations: int,
) -> tuple[NDArray[np.float64], int, float]:
    """
    Spectral projected gradient on the augmented Lagrangian.

    Returns:
        Final point, iterations used and the final projected gradient norm
    """

    def value_and_gradient(w: NDArray[np.float64]) -> tuple[float, NDArray[np.float64]]:
        c = problem.constraint(w)
        value = -problem.utility(w) - multiplier * c + 0.5 * penalty * c * c
        grad = problem.objective_gradient + (penalty * c - multiplier) * problem.constraint_gradient(w)
        return value, grad

    f, g = value_and_gradient(v)
    history: deque[float] = deque([f], maxlen=NONMONOTONE_MEMORY)
    pg_norm = float(np.max(np.abs(problem.project(v - g) - v)))
    step = 1.0 / max(pg_norm, STEP_BOUNDS[0])

    iteration = 0
    while iteration < max_iterations and pg_norm > tol:
        iteration += 1
        d = problem.project(v - step * g) - v
        slope = float(g @ d)
        reference = max(history)
        t = 1.0
        while True:
            trial = v + t * d
            f_trial, g_trial = value_and_gradient(trial)
            if f_trial <= reference + ARMIJO * t * slope:
                break
            t *= 0.5
            if t < 1e-20:
                logger.debug("Line search stalled")
                return v, iteration, pg_norm
        s = trial - v
        yk = g_trial - g
        v, f, g = trial, f_trial, g_trial
        history.append(f)
        sy = float(s @ yk)
        step = float(np.clip(s @ s / sy, *STEP_BOUNDS)) if sy > 0.0 else STEP_BOUNDS[1]
        pg_norm = float(np.max(np.abs(problem.project(v - g) - v)))
    return v, iteration, pg_norm


def _augmented_lagrangian(
    problem: TradeProblem,
    start: NDArray[np.float64],
) -> tuple[NDArray[np.float64], bool, int, float]:
    """
    Augmented Lagrangian outer loop.

    Returns:
        Final point, convergence flag, inner iterations and the multiplier alpha
    """
    options = problem.options
    v = problem.project(start)
    multiplier = problem.initial_multiplier(v)
    penalty = options.penalty_initial
    previous = math.inf
    iterations = 0
    converged = False
    for outer in range(options.max_outer_iterations):
        inner_tol = max(options.stationarity_tol, 10.0 ** (-2 - outer))
        v, used, pg_norm = _projected_gradient(
            problem, v, multiplier, penalty, inner_tol, options.max_inner_iterations
        )
        iterations += used
        c = problem.constraint(v)
        if abs(c) <= options.constraint_tol and pg_norm <= options.stationarity_tol:
            converged = True
            break
        multiplier -= penalty * c
        if abs(c) > 0.25 * previous:
            penalty = min(penalty * options.penalty_growth, MAX_PENALTY)
        previous = abs(c)
        logger.debug(f"Outer iteration {outer}: |c|={abs(c):.3e} pg={pg_norm:.3e} rho={penalty:.1e}")
    return v, converged, iterations, multiplier / problem.scale


def _slsqp(
    problem: TradeProblem,
    start: NDArray[np.float64],
) -> tuple[NDArray[np.float64], bool, int, float | None]:
    options = problem.options

    def objective(v: NDArray[np.float64]) -> float:
        return -problem.utility(problem.project(v))

    def objective_gradient(v: NDArray[np.float64]) -> NDArray[np.float64]:
        return problem.objective_gradient

    def constraint(v: NDArray[np.float64]) -> float:
        return problem.constraint(problem.project(v))

    def constraint_gradient(v: NDArray[np.float64]) -> NDArray[np.float64]:
        return problem.constraint_gradient(problem.project(v))

    result = optimize.minimize(
        objective,
        problem.project(start),
        jac=objective_gradient,
        method="SLSQP",
        bounds=optimize.Bounds(problem.lower, problem.upper),
        constraints=[{"type": "eq", "fun": constraint, "jac": constraint_gradient}],
        options={"maxiter": options.max_outer_iterations * 20, "ftol": 1e-14},
    )
    v = problem.project(result.x)
    converged = bool(result.success) and abs(problem.constraint(v)) <= max(options.constraint_tol, 1e-8)
    return v, converged, int(result.nit), None


def _starts(problem: TradeProblem, rng: np.random.Generator) -> list[NDArray[np.float64]]:
    """
    Starting points in solve order.

    The zero trade, then one receive and one tender start per non-numeraire
    asset (level restored on the numeraire), then seeded random points.
    """
    count = problem.options.multistart_count
    n, k = problem.n, problem.numeraire
    starts = [np.zeros(2 * n)]
    for i in range(n):
        if i == k:
            continue
        for side, amount in ((0, RECEIVE_START * problem.reserves[i]), (1, TENDER_START * problem.reserves[i])):
            if len(starts) >= count:
                return starts
            x, y = np.zeros(n), np.zeros(n)
            (x if side == 0 else y)[i] = amount
            try:
                x, y = _restore(problem, x, y)
            except RootFindError:
                logger.debug(f"Probe start on asset {i} could not be restored")
            starts.append(np.concatenate([x, y]))
    while len(starts) < count:
        x = rng.uniform(0.0, 0.5, n) * problem.reserves
        y = rng.uniform(0.0, 1.0, n) * np.minimum(problem.cap, problem.reserves)
        starts.append(np.concatenate([x, y]))
    return starts


def _solve_start(problem: TradeProblem, index: int, start: NDArray[np.float64]) -> StartOutcome:
    if problem.options.method is SolverMethod.SLSQP:
        v, converged, iterations, multiplier = _slsqp(problem, start)
    else:
        v, converged, iterations, multiplier = _augmented_lagrangian(problem, start)
    x, y = (part.copy() for part in problem.split(v))
    try:
        x, y = _restore(problem, x, y)
    except RootFindError as e:
        logger.debug(f"Start {index}: level restoration failed: {e}")
    rejected = False
    if problem.options.complementarity_cleanup:
        x, y, rejected = _cleanup(problem, x, y)
    w = np.concatenate([x, y])
    return StartOutcome(
        start=index,
        x=x,
        y=y,
        objective=problem.utility(w),
        residual=abs(problem.constraint(w)),
        converged=converged,
        iterations=iterations,
        multiplier=multiplier,
        cleanup_rejected=rejected,
    )


def _better(candidate: StartOutcome, incumbent: StartOutcome | None) -> bool:
    if incumbent is None:
        return True
    tie = TIE_TOLERANCE * max(1.0, abs(incumbent.objective))
    if candidate.objective > incumbent.objective + tie:
        return True
    if candidate.objective >= incumbent.objective - tie:
        return candidate.size < incumbent.size
    return False


def solve(
    pool: Pool,
    utility: LinearUtility,
    options: SolverOptions | None = None,
) -> SolveResult:
    """
    Solve the optimal-trade problem for a linear utility.

    With the default single start this is a local solve from the zero trade.
    Matching the grid oracle on small pools takes at least 2n - 1 starts so
    that every receive and tender boundary start is tried.

    Args:
        pool: Pool state
        utility: Linear utility of the trader
        options: Solver options, defaults when omitted

    Returns:
        Best feasible trade over all starts, never worse than the zero trade.
        Status CAPPED marks a converged trade whose tender sits at the cap,
        so the trade is optimal only for the capped problem.

    Raises:
        DomainError: If the utility does not match the pool
    """
    options = options or SolverOptions()
    problem = TradeProblem(pool, utility, options)
    rng = np.random.default_rng(options.seed)
    starts = _starts(problem, rng)
    feasible_tol = max(options.constraint_tol, 1e-9)

    best: StartOutcome | None = None
    iterations = 0
    for index, start in enumerate(starts):
        outcome = _solve_start(problem, index, start)
        iterations += outcome.iterations
        logger.debug(
            f"Start {index}: objective={outcome.objective:.9g} residual={outcome.residual:.2e} "
            f"converged={outcome.converged}"
        )
        if outcome.residual <= feasible_tol and _better(outcome, best):
            best = outcome

    n = pool.dimension
    if best is None:
        logger.error(f"No start reached the level constraint within {feasible_tol:g}")
        return SolveResult(
            trade=Trade.zero(n),
            objective=0.0,
            constraint_residual=0.0,
            status=SolveStatus.INFEASIBLE,
            iterations=iterations,
            starts_used=len(starts),
        )

    status = SolveStatus.CONVERGED if best.converged else SolveStatus.MAX_ITERATIONS
    if best.objective < -TIE_TOLERANCE:
        logger.warning(f"Best start has objective {best.objective!r}; falling back to the zero trade")
        best = StartOutcome(
            start=best.start,
            x=np.zeros(n),
            y=np.zeros(n),
            objective=0.0,
            residual=0.0,
            converged=False,
            iterations=0,
            multiplier=None,
            cleanup_rejected=False,
        )
        status = SolveStatus.MAX_ITERATIONS

    cap_active = problem.cap_active(best.y)
    if cap_active:
        logger.warning(f"Tender cap active at indices {cap_active}")
        if status is SolveStatus.CONVERGED:
            status = SolveStatus.CAPPED
    if status is SolveStatus.MAX_ITERATIONS:
        logger.warning(f"Solver stopped without convergence after {iterations} iterations")

    trade = Trade(x=tuple(best.x.tolist()), y=tuple(best.y.tolist()))
    if trade.is_zero:
        logger.info(f"Zero trade kept over {len(starts)} start(s)")
    return SolveResult(
        trade=trade,
        objective=best.objective,
        constraint_residual=best.residual,
        status=status,
        iterations=iterations,
        starts_used=len(starts),
        best_start=best.start,
        multiplier=best.multiplier,
        cap_active=cap_active,
        cleanup_rejected=best.cleanup_rejected,
    )
