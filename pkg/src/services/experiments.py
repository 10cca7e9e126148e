"""
Experiments: price tables and price perturbation sweeps.

Sweeps scale the utility prices of one or two assets away from the marginal
prices of the pool, solve the optimal-trade problem at every grid point and
compare the solver's no-trade decision with the closed form. Grid points are
independent and are distributed over a bounded process pool; results keep
grid order.
"""

import json
import logging
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from src.models.experiment import ExperimentConfig, PriceTable, SweepResult, SweepRow
from src.models.market import LinearUtility, Pool
from src.models.solver import SolverOptions
from src.services import plotting
from src.services.errors import CFMMError, ConfigError
from src.services.notrade import in_no_trade_region, no_trade_t_interval
from src.services.optimality import verify_system
from src.services.solver import solve
from src.services.trade_functions import evaluate, prices

logger = logging.getLogger(__name__)

NO_TRADE_THRESHOLD = 1e-4
VERIFY_TOLERANCE = 1e-5
FORWARD_DIFFERENCE_STEP = 1e-7
CSV_FLOAT_FORMAT = "%.9g"


def load_config(path: str | Path) -> ExperimentConfig:
    """
    Load an experiment configuration document.

    Raises:
        ConfigError: If the file cannot be read or is not JSON
        ValidationError: If the document does not match the schema
    """
    path = Path(path)
    try:
        document = json.loads(path.read_text())
    except OSError as e:
        raise ConfigError(f"Cannot read configuration {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Configuration {path} is not valid JSON: {e}") from e
    config = ExperimentConfig.model_validate(document)
    logger.info(f"Loaded experiment '{config.name}' from {path}")
    return config


def perturbed_utility(
    pool: Pool,
    perturbed: Sequence[int],
    t: float,
    s: float | None = None,
    base_prices: NDArray[np.float64] | None = None,
) -> LinearUtility:
    """Utility pi = p with pi[perturbed[0]] scaled by t and pi[perturbed[1]] by s."""
    p = prices(pool.trade_function, pool.reserves, pool.numeraire_index) if base_prices is None else base_prices
    utility = LinearUtility(prices=tuple(float(v) for v in p)).perturbed(perturbed[0], t)
    if s is not None:
        utility = utility.perturbed(perturbed[1], s)
    return utility


def forward_difference_prices(pool: Pool) -> NDArray[np.float64]:
    """Prices from forward differences of phi with step 1e-7 * max(1, R_i)."""
    reserves = np.asarray(pool.reserves, dtype=np.float64)
    base = evaluate(pool.trade_function, reserves)
    grad = np.empty_like(reserves)
    for i in range(len(reserves)):
        h = FORWARD_DIFFERENCE_STEP * max(1.0, reserves[i])
        shifted = reserves.copy()
        shifted[i] += h
        grad[i] = (evaluate(pool.trade_function, shifted) - base) / h
    return grad / grad[pool.numeraire_index]


def run_prices(config: ExperimentConfig) -> PriceTable:
    """Analytic marginal prices of the configured pool next to forward differences."""
    pool = config.pool
    analytic = prices(pool.trade_function, pool.reserves, pool.numeraire_index)
    numeric = forward_difference_prices(pool)
    return PriceTable(
        analytic=analytic.tolist(),
        forward_difference=numeric.tolist(),
        max_discrepancy=float(np.max(np.abs(analytic - numeric))),
    )


def sweep_point(
    pool: Pool,
    base_prices: Sequence[float],
    perturbed: Sequence[int],
    options: SolverOptions,
    t: float,
    s: float | None = None,
) -> SweepRow:
    """Solve, verify and classify one grid point of a sweep."""
    utility = perturbed_utility(pool, perturbed, t, s, np.asarray(base_prices))
    result = solve(pool, utility, options)
    trade = result.trade
    net = list(trade.net)
    try:
        residual = verify_system(pool, utility, trade, tol=VERIFY_TOLERANCE).max_residual
    except CFMMError as e:
        logger.warning(f"Verification failed at t={t} s={s}: {e}")
        residual = float("nan")
    return SweepRow(
        t=t,
        s=s,
        x=list(trade.x),
        y=list(trade.y),
        net=net,
        objective=result.objective,
        no_trade_solver=max(abs(z) for z in net) <= NO_TRADE_THRESHOLD,
        no_trade_closed_form=in_no_trade_region(pool, utility),
        verify_residual=residual,
        solver_status=result.status,
    )


def _sweep_task(args: tuple[Pool, list[float], tuple[int, ...], SolverOptions, float, float | None]) -> SweepRow:
    return sweep_point(*args)


def _run_grid(
    config: ExperimentConfig,
    points: list[tuple[float, float | None]],
    workers: int,
) -> list[SweepRow]:
    pool = config.pool
    base = prices(pool.trade_function, pool.reserves, pool.numeraire_index).tolist()
    tasks = [(pool, base, config.sweep.perturbed, config.solver, t, s) for t, s in points]
    logger.info(f"Sweeping {len(tasks)} grid points with {workers} worker(s)")
    if workers <= 1:
        return [_sweep_task(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(_sweep_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def run_sweep1d(config: ExperimentConfig, workers: int = 1) -> SweepResult:
    """Sweep t over its range, scaling the utility price of the first perturbed asset."""
    sweep = config.sweep
    grid = np.linspace(*sweep.t_range, sweep.points_1d)
    rows = _run_grid(config, [(float(t), None) for t in grid], workers)
    result = SweepResult(name=config.name, perturbed=sweep.perturbed[:1], rows=rows)
    if result.disagreements:
        logger.info(f"Solver and closed form disagree at {len(result.disagreements)} points")
    return result


def run_sweep2d(config: ExperimentConfig, workers: int = 1) -> SweepResult:
    """
    Sweep (t, s) over the product grid, scaling the first and second perturbed assets.

    Raises:
        ConfigError: If fewer than two perturbed indices are configured
    """
    sweep = config.sweep
    if len(sweep.perturbed) < 2:
        raise ConfigError("A two-dimensional sweep needs two perturbed indices")
    t_grid = np.linspace(*sweep.t_range, sweep.points_2d)
    s_grid = np.linspace(*sweep.s_range, sweep.points_2d)
    points = [(float(t), float(s)) for s in s_grid for t in t_grid]
    rows = _run_grid(config, points, workers)
    return SweepResult(name=config.name, perturbed=sweep.perturbed[:2], rows=rows)


def sweep_frame(result: SweepResult) -> pd.DataFrame:
    """Tabular form of a sweep with one column per asset and quantity."""
    records = []
    for row in result.rows:
        record: dict[str, object] = {"t": row.t}
        if row.s is not None:
            record["s"] = row.s
        for name, values in (("x", row.x), ("y", row.y), ("net", row.net)):
            for i, value in enumerate(values, start=1):
                record[f"{name}{i}"] = value
        record.update(
            objective=row.objective,
            no_trade_solver=row.no_trade_solver,
            no_trade_closed_form=row.no_trade_closed_form,
            verify_residual=row.verify_residual,
            solver_status=row.solver_status.value,
        )
        records.append(record)
    return pd.DataFrame.from_records(records)


def write_csv(result: SweepResult, path: Path) -> Path:
    """Write a sweep as CSV with 9 significant digits."""
    sweep_frame(result).to_csv(
        path, index=False, float_format=CSV_FLOAT_FORMAT, na_rep="nan", lineterminator="\n"
    )
    logger.info(f"Wrote {path}")
    return path


def write_sweep_artifacts(
    config: ExperimentConfig,
    result: SweepResult,
    directory: Path,
) -> list[Path]:
    """Write the CSV table and the SVG figure of a sweep."""
    directory.mkdir(parents=True, exist_ok=True)
    kind = "sweep2d" if len(result.perturbed) == 2 else "sweep1d"
    stem = f"{config.stem}_{kind}"
    paths = [write_csv(result, directory / f"{stem}.csv")]
    if kind == "sweep1d":
        interval = no_trade_t_interval(
            config.pool,
            prices(config.pool.trade_function, config.pool.reserves, config.pool.numeraire_index),
            result.perturbed[0],
        )
        paths.append(plotting.plot_sweep1d(result, directory / f"{stem}.svg", interval))
    else:
        paths.append(plotting.plot_sweep2d(result, directory / f"{stem}.svg"))
    return paths

