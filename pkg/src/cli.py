"""
Command-line interface.

Every subcommand takes ``--config PATH`` pointing at an experiment document and
prints its result as JSON, or writes CSV/SVG artifacts for the sweeps::

    python -m src.cli prices --config configs/reference_qm.json
    python -m src.cli solve --config configs/reference_qm.json --t 1.5
    python -m src.cli sweep1d --config configs/reference_gm.json --out results --workers 4

Exit codes: 0 on success, 2 on configuration or validation errors, 1 when a
numerical service fails.
"""

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from pydantic import BaseModel, ValidationError

from src.config import get_settings
from src.models import (
    ExperimentConfig,
    GridSpec,
    LinearUtility,
    TradeFunction,
)
from src.services import CFMMError, ConfigError
from src.services import experiments, notrade, optimality, oracle, solver
from src.services.trade_functions import (
    certify_monotone,
    certify_quasilinear_level_set,
    probe_convexity,
)

logger = logging.getLogger(__name__)

TRADE_FUNCTIONS = ("am", "gm", "qm")


def _trade_function(code: str, n: int) -> TradeFunction:
    if code == "am":
        return TradeFunction.arithmetic(n)
    if code == "gm":
        return TradeFunction.geometric(n)
    return TradeFunction.power_log(2.0, n)


def _load(args: argparse.Namespace) -> ExperimentConfig:
    config = experiments.load_config(args.config)
    if args.tf is not None:
        pool = config.pool.with_trade_function(_trade_function(args.tf, config.pool.dimension))
        config = config.model_copy(update={"pool": pool, "name": f"{config.name}_{args.tf}"})
    return config


def _utility(config: ExperimentConfig, args: argparse.Namespace) -> LinearUtility:
    s = args.s if len(config.sweep.perturbed) > 1 else None
    return experiments.perturbed_utility(config.pool, config.sweep.perturbed, args.t, s)


def _emit(document: object) -> None:
    if isinstance(document, BaseModel):
        print(document.model_dump_json(indent=2))
    else:
        print(json.dumps(document, indent=2))


def cmd_prices(config: ExperimentConfig, args: argparse.Namespace) -> None:
    _emit(experiments.run_prices(config))


def cmd_solve(config: ExperimentConfig, args: argparse.Namespace) -> None:
    _emit(solver.solve(config.pool, _utility(config, args), config.solver))


def cmd_verify(config: ExperimentConfig, args: argparse.Namespace) -> None:
    utility = _utility(config, args)
    result = solver.solve(config.pool, utility, config.solver)
    report = optimality.verify_system(config.pool, utility, result.trade, tol=args.tol)
    _emit({
        "solve": result.model_dump(mode="json"),
        "report": report.model_dump(mode="json"),
    })


def cmd_notrade(config: ExperimentConfig, args: argparse.Namespace) -> None:
    _emit(notrade.analyze(config.pool, _utility(config, args)))


def cmd_oracle(config: ExperimentConfig, args: argparse.Namespace) -> None:
    utility = _utility(config, args)
    bound = oracle.price_norm_bound(config.pool, utility) if args.price_norm_bound else None
    grid = GridSpec(
        resolution=args.resolution,
        y_cap_factor=config.solver.y_cap_factor,
        lipschitz_bound=bound,
    )
    _emit(oracle.grid_search(config.pool, utility, grid))


def cmd_certify(config: ExperimentConfig, args: argparse.Namespace) -> None:
    tf = config.pool.trade_function
    seed = config.seed
    _emit({
        "declared": tf.declared_hypotheses,
        "monotone": certify_monotone(tf, args.trials, seed).model_dump(mode="json"),
        "quasilinear": certify_quasilinear_level_set(tf, args.trials, seed).model_dump(mode="json"),
        "convexity": probe_convexity(tf, 10 * args.trials, seed).model_dump(mode="json"),
    })


def _output_directory(config: ExperimentConfig, args: argparse.Namespace) -> Path:
    if args.out is not None:
        return Path(args.out)
    return Path(config.output.directory or get_settings().output_dir)


def _workers(args: argparse.Namespace) -> int:
    return args.workers if args.workers is not None else get_settings().workers


def cmd_sweep1d(config: ExperimentConfig, args: argparse.Namespace) -> None:
    result = experiments.run_sweep1d(config, workers=_workers(args))
    paths = experiments.write_sweep_artifacts(config, result, _output_directory(config, args))
    _emit({"rows": len(result.rows), "disagreements": len(result.disagreements),
           "files": [str(p) for p in paths]})


def cmd_sweep2d(config: ExperimentConfig, args: argparse.Namespace) -> None:
    result = experiments.run_sweep2d(config, workers=_workers(args))
    paths = experiments.write_sweep_artifacts(config, result, _output_directory(config, args))
    _emit({"rows": len(result.rows), "disagreements": len(result.disagreements),
           "files": [str(p) for p in paths]})


COMMANDS = {
    "prices": (cmd_prices, "Analytic and forward-difference marginal prices"),
    "solve": (cmd_solve, "Optimal trade at the perturbed prices"),
    "verify": (cmd_verify, "Solve, then verify the optimality system"),
    "notrade": (cmd_notrade, "Closed-form no-trade verdict and t intervals"),
    "oracle": (cmd_oracle, "Exhaustive grid search, at most three assets"),
    "certify": (cmd_certify, "Sampled monotonicity, level-set and convexity checks"),
    "sweep1d": (cmd_sweep1d, "One-parameter price sweep, CSV and SVG"),
    "sweep2d": (cmd_sweep2d, "Two-parameter price sweep, CSV and SVG"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfmm",
        description="Optimal trades and no-trade conditions for constant function market makers",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--config", required=True, help="Experiment configuration (JSON)")
        sub.add_argument("--tf", choices=TRADE_FUNCTIONS, default=None,
                         help="Override the trade function: arithmetic, geometric or power-log mean")
        sub.add_argument("--t", type=float, default=1.0, help="Scale of the first perturbed price")
        sub.add_argument("--s", type=float, default=1.0, help="Scale of the second perturbed price")
        sub.add_argument("--out", default=None, help="Output directory of sweep artifacts")
        sub.add_argument("--workers", type=int, default=None, help="Worker processes of sweeps")
        sub.add_argument("--tol", type=float, default=experiments.VERIFY_TOLERANCE,
                         help="Relative tolerance of verification")
        sub.add_argument("--resolution", type=float, default=1e-2, help="Oracle grid resolution")
        sub.add_argument("--price-norm-bound", action="store_true",
                         help="Report the oracle Lipschitz bound as ||pi||_1 (1 + max gamma)")
        sub.add_argument("--trials", type=int, default=1000, help="Certification trials")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else get_settings().log_level
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    handler, _ = COMMANDS[args.command]
    try:
        config = _load(args)
        handler(config, args)
    except (ValidationError, ConfigError) as e:
        logger.error(f"Invalid configuration: {e}")
        return 2
    except CFMMError as e:
        logger.error(f"{args.command} failed: {e}")
        return 1
    except Exception as e:
        logger.error(f"Unexpected error in {args.command}: {e}", exc_info=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
