"""
Solver Models

Options and results of the optimal-trade solver.
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from src.models.market import Trade


class SolverMethod(str, Enum):
    """Numerical backends of the optimal-trade solver."""

    AUGMENTED_LAGRANGIAN = "augmented_lagrangian"
    SLSQP = "slsqp"


class SolveStatus(str, Enum):
    """Outcome of a solve."""

    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"
    INFEASIBLE = "infeasible"
    CAPPED = "capped"


class SolverOptions(BaseModel):
    """
    Options of the optimal-trade solver.

    Attributes:
        method: Numerical backend
        max_outer_iterations: Multiplier updates of the augmented Lagrangian
        max_inner_iterations: Projected gradient iterations per subproblem
        penalty_initial: Initial penalty rho
        penalty_growth: Factor applied to rho when the level residual stalls
        constraint_tol: Relative level residual accepted as feasible
        stationarity_tol: Projected gradient norm accepted as stationary
        multistart_count: Number of starts; the zero trade always comes first,
            followed by boundary starts and seeded random starts. A single start
            is a local solve; 2n - 1 starts cover every boundary start
        complementarity_cleanup: Remove simultaneous receive/tender amounts after solving
        seed: Seed of the random starts
        y_cap_factor: Tender cap as a multiple of the reserves
        interior_shift: Receive amounts stay below R - interior_shift * min(R)
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    method: SolverMethod = Field(default=SolverMethod.AUGMENTED_LAGRANGIAN)
    max_outer_iterations: int = Field(default=50, ge=1)
    max_inner_iterations: int = Field(default=2000, ge=1)
    penalty_initial: float = Field(default=10.0, gt=0.0)
    penalty_growth: float = Field(default=10.0, gt=1.0)
    constraint_tol: float = Field(default=1e-10, gt=0.0)
    stationarity_tol: float = Field(default=1e-9, gt=0.0)
    multistart_count: int = Field(default=1, ge=1)
    complementarity_cleanup: bool = Field(default=True)
    seed: int = Field(default=0)
    y_cap_factor: float = Field(default=10.0, gt=0.0)
    interior_shift: float = Field(default=1e-9, gt=0.0, lt=1e-3)


class SolveResult(BaseModel):
    """
    Result of an optimal-trade solve.

    Attributes:
        trade: Best trade found
        objective: Utility of the net trade, pi . (x - y)
        constraint_residual: Relative level residual of the returned trade
        status: Solve outcome
        iterations: Total inner iterations over all starts
        starts_used: Number of starts that were solved
        best_start: Index of the start that produced the trade
        multiplier: Level constraint multiplier estimate, when available
        cap_active: Indices whose tender sits at the tender cap
        cleanup_rejected: Complementarity cleanup did not keep the objective
    """

    trade: Trade
    objective: float
    constraint_residual: float
    status: SolveStatus
    iterations: int = Field(default=0, ge=0)
    starts_used: int = Field(default=1, ge=0)
    best_start: int = Field(default=0, ge=0)
    multiplier: float | None = None
    cap_active: list[int] = Field(default_factory=list)
    cleanup_rejected: bool = False

    @property
    def converged(self) -> bool:
        return self.status is SolveStatus.CONVERGED


class GridSpec(BaseModel):
    """
    Grid of the exhaustive search over net trades.

    The grid covers the net amounts of every asset except the numeraire; the
    numeraire amount follows from the level constraint.

    Attributes:
        resolution: Grid spacing
        lower: Per-asset lower bounds of the net amounts, -y_cap_factor * R_i when omitted
        upper: Per-asset upper bounds of the net amounts, R_i when omitted
        y_cap_factor: Tender cap as a multiple of the reserves
        max_points: Largest admissible number of grid points
        lipschitz_bound: Fixed bound L on the objective change per unit of grid
            spacing; the gradient bound along the level set when omitted
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    resolution: float = Field(default=1e-3, gt=0.0)
    lower: tuple[float, ...] | None = None
    upper: tuple[float, ...] | None = None
    y_cap_factor: float = Field(default=10.0, gt=0.0)
    max_points: int = Field(default=5_000_000, ge=1)
    lipschitz_bound: float | None = Field(default=None, gt=0.0)
