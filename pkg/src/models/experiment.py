"""
Experiment Models

Experiment configuration documents and sweep results.

An experiment configuration is a JSON document::

    {
      "name": "reference_qm",
      "seed": 0,
      "pool": {
        "reserves": [1, 3, 2, 5, 7, 6],
        "fees": 0.9,
        "trade_function": {"kind": "quasi_arithmetic",
                           "generator": {"kind": "power_log", "p": 2}},
        "numeraire": 5
      },
      "sweep": {"perturbed": [0, 1], "t_range": [0.5, 2.0], "s_range": [0.5, 2.0],
                "points_1d": 151, "points_2d": 61},
      "solver": {"multistart_count": 1},
      "output": {"directory": "results"}
    }
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.models.market import Pool
from src.models.solver import SolverOptions, SolveStatus


class SweepSpec(BaseModel):
    """
    Price perturbation sweep.

    Attributes:
        perturbed: Indices whose utility prices are scaled by t (and s)
        t_range: Range of the first scaling factor
        s_range: Range of the second scaling factor
        points_1d: Grid points of a one-dimensional sweep
        points_2d: Grid points per axis of a two-dimensional sweep
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    perturbed: tuple[int, ...] = Field(default=(0, 1), min_length=1, max_length=2)
    t_range: tuple[float, float] = Field(default=(0.5, 2.0))
    s_range: tuple[float, float] = Field(default=(0.5, 2.0))
    points_1d: int = Field(default=151, ge=2)
    points_2d: int = Field(default=61, ge=2)

    @model_validator(mode="after")
    def validate_ranges(self) -> "SweepSpec":
        for name, (lo, hi) in (("t_range", self.t_range), ("s_range", self.s_range)):
            if not 0.0 < lo < hi:
                raise ValueError(f"{name} must satisfy 0 < lower < upper, got ({lo}, {hi})")
        return self


class OutputSpec(BaseModel):
    """Where experiment artifacts are written."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    directory: str | None = Field(default=None, description="Output directory")
    stem: str | None = Field(default=None, description="File name stem, the experiment name")


class ExperimentConfig(BaseModel):
    """
    Experiment configuration.

    Attributes:
        name: Experiment name
        seed: Seed of all randomized components
        pool: Pool instance
        sweep: Price perturbation sweep
        solver: Solver options
        output: Artifact location
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(..., min_length=1)
    seed: int = Field(default=0)
    pool: Pool
    sweep: SweepSpec = Field(default_factory=SweepSpec)
    solver: SolverOptions = Field(default_factory=SolverOptions)
    output: OutputSpec = Field(default_factory=OutputSpec)

    @model_validator(mode="after")
    def validate_perturbed(self) -> "ExperimentConfig":
        n = self.pool.dimension
        for index in self.sweep.perturbed:
            if not 0 <= index < n:
                raise ValueError(f"Perturbed index {index} out of range for {n} assets")
        return self

    @property
    def stem(self) -> str:
        return self.output.stem or self.name


class PriceTable(BaseModel):
    """Analytic prices next to forward-difference prices."""

    analytic: list[float]
    forward_difference: list[float]
    max_discrepancy: float


class SweepRow(BaseModel):
    """One grid point of a price perturbation sweep."""

    t: float
    s: float | None = None
    x: list[float]
    y: list[float]
    net: list[float]
    objective: float
    no_trade_solver: bool
    no_trade_closed_form: bool
    verify_residual: float
    solver_status: SolveStatus


class SweepResult(BaseModel):
    """Rows of a sweep with the perturbed indices."""

    name: str
    perturbed: tuple[int, ...]
    rows: list[SweepRow]

    @property
    def disagreements(self) -> list[SweepRow]:
        """Rows where the solver and the closed form disagree on no-trade."""
        return [row for row in self.rows if row.no_trade_solver != row.no_trade_closed_form]
