"""
Core services for optimal trading against constant function market makers.
"""

from . import (
    experiments,
    market_model,
    notrade,
    optimality,
    oracle,
    solver,
    special_functions,
    trade_functions,
)
from .errors import (
    CFMMError,
    ConfigError,
    ConvergenceError,
    DomainError,
    NoBracket,
    NotComplementary,
    NumeraireError,
    RootFindError,
)

__all__ = [
    "CFMMError",
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "NoBracket",
    "NotComplementary",
    "NumeraireError",
    "RootFindError",
    "experiments",
    "market_model",
    "notrade",
    "optimality",
    "oracle",
    "solver",
    "special_functions",
    "trade_functions",
]
