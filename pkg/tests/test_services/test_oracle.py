"""
Tests for the exhaustive grid oracle and its agreement with the solver.
"""

import numpy as np
import pytest

from src.models import (
    FeeSchedule,
    GridSpec,
    LinearUtility,
    Pool,
    SolverOptions,
    Trade,
    TradeFunction,
    Verdict,
)
from src.services import DomainError
from src.services.market_model import is_feasible
from src.services.optimality import verify_system
from src.services.oracle import grid_search, grid_solve, price_norm_bound
from src.services.solver import restore_level, solve
from src.services.trade_functions import prices
from tests.fixtures.sample_pools import create_random_pool

COARSE = GridSpec(resolution=1e-2)


@pytest.fixture
def square_pool() -> Pool:
    """Two-asset arithmetic pool with reserves (2, 2)."""
    return Pool(
        reserves=(2.0, 2.0),
        fees=FeeSchedule.uniform(0.9, 2),
        trade_function=TradeFunction.arithmetic(2),
    )


class TestGridSearch:
    """Tests for the grid oracle."""

    @pytest.mark.services
    @pytest.mark.unit
    def test_marginal_prices_give_zero_trade(self, square_pool):
        """Test that the zero grid point wins at the marginal prices."""
        result = grid_search(square_pool, LinearUtility(prices=(1.0, 1.0)), COARSE)
        assert result.trade.is_zero
        assert result.objective == 0.0

    @pytest.mark.services
    @pytest.mark.unit
    def test_doubled_price(self, square_pool):
        """Test that the grid optimum approaches the drain within the Lipschitz bound."""
        result = grid_search(square_pool, LinearUtility(prices=(2.0, 1.0)), COARSE)
        optimum = 2.0 * (2.0 - 1.0 / 0.9)
        assert result.objective <= optimum
        assert optimum - result.objective <= result.lipschitz_bound * result.resolution
        assert result.trade.x[0] == pytest.approx(1.99)
        assert result.trade.y[1] == pytest.approx(1.99 / 0.9)
        assert is_feasible(square_pool, result.trade, tol=1e-9).feasible

    @pytest.mark.services
    @pytest.mark.unit
    def test_fixed_lipschitz_bound(self, square_pool):
        """Test that a configured bound replaces the gradient bound."""
        utility = LinearUtility(prices=(2.0, 1.0))
        coarse = price_norm_bound(square_pool, utility)
        assert coarse == pytest.approx(3.0 * 1.9)

        derived = grid_search(square_pool, utility, COARSE)
        fixed = grid_search(
            square_pool, utility, GridSpec(resolution=1e-2, lipschitz_bound=coarse)
        )
        assert fixed.lipschitz_bound == coarse
        assert fixed.trade == derived.trade
        assert derived.lipschitz_bound != coarse

    @pytest.mark.services
    @pytest.mark.unit
    def test_geometric_pool(self):
        """Test that an over-valued asset is received from a geometric pool."""
        pool = Pool(
            reserves=(10.0, 10.0),
            fees=FeeSchedule.uniform(0.99, 2),
            trade_function=TradeFunction.geometric(2),
        )
        grid = GridSpec(resolution=1e-2, y_cap_factor=1.0)
        assert grid_search(pool, LinearUtility(prices=(1.0, 1.0)), grid).trade.is_zero

        result = grid_search(pool, LinearUtility(prices=(2.0, 1.0)), grid)
        # interior optimum at x = 10 - sqrt(50.5)
        assert result.objective > 1.6
        assert result.trade.x[0] == pytest.approx(10.0 - np.sqrt(50.5), abs=1e-2)
        assert result.trade.y[0] == 0.0

    @pytest.mark.services
    @pytest.mark.unit
    def test_grid_size(self, square_pool):
        """Test the number of grid points of the default bounds."""
        result = grid_search(square_pool, LinearUtility(prices=(1.0, 1.0)), COARSE)
        # net amounts of asset 0 from -20 to 1.99
        assert result.grid_points == 2200

    @pytest.mark.services
    @pytest.mark.validation
    def test_too_many_assets(self):
        """Test that the oracle refuses more than three assets."""
        pool = create_random_pool(0, n=4)
        with pytest.raises(DomainError, match="at most 3"):
            grid_search(pool, LinearUtility(prices=(1.0,) * 4))

    @pytest.mark.services
    @pytest.mark.validation
    def test_grid_limit(self):
        """Test that oversized grids are rejected."""
        pool = create_random_pool(0, n=3)
        with pytest.raises(DomainError, match="limit"):
            grid_search(pool, LinearUtility(prices=(1.0,) * 3), GridSpec(resolution=1e-3, max_points=1000))

    @pytest.mark.services
    @pytest.mark.unit
    def test_grid_solve_result(self, square_pool):
        """Test the grid optimum reported in the solver result shape."""
        utility = LinearUtility(prices=(2.0, 1.0))
        result = grid_solve(square_pool, utility, COARSE)
        assert result.converged
        assert result.objective == grid_search(square_pool, utility, COARSE).objective
        assert result.constraint_residual <= 1e-9
        assert result.iterations == 2200


class TestSolverAgreement:
    """Cross-checks between the solver and the grid oracle on small pools."""

    @pytest.mark.services
    @pytest.mark.slow
    @pytest.mark.parametrize("code", ["gm", "qm"])
    def test_solver_matches_oracle(self, code):
        """Test that every grid optimum is matched within L * h and converged trades verify."""
        options = SolverOptions(multistart_count=8, y_cap_factor=1.0)
        grid = GridSpec(resolution=1e-3, y_cap_factor=1.0)
        for seed in range(50):
            pool = create_random_pool(seed, n=2, code=code)
            rng = np.random.default_rng(100 + seed)
            p = prices(pool.trade_function, pool.reserves)
            utility = LinearUtility(prices=(float(p[0] * rng.uniform(0.5, 2.0)), 1.0))

            found = solve(pool, utility, options)
            reference = grid_search(pool, utility, grid)

            slack = reference.lipschitz_bound * reference.resolution
            assert found.objective >= reference.objective - slack, f"seed {seed}"
            assert found.objective <= reference.objective + slack, f"seed {seed}"
            if found.converged:
                report = verify_system(pool, utility, found.trade, tol=1e-5)
                assert report.verdict is Verdict.VERIFIED, f"seed {seed}"

    @pytest.mark.services
    @pytest.mark.integration
    def test_single_start_is_local(self):
        """Test that the zero-trade start alone misses a distant optimum that boundary starts reach."""
        pool = create_random_pool(3, n=2, code="qm")
        utility = LinearUtility(prices=(0.7717, 1.0))

        local = solve(pool, utility, SolverOptions(y_cap_factor=1.0))
        found = solve(pool, utility, SolverOptions(multistart_count=8, y_cap_factor=1.0))
        reference = grid_search(pool, utility, GridSpec(resolution=1e-2, y_cap_factor=1.0))

        assert local.objective < 0.1
        assert found.objective > 0.8
        assert found.objective >= reference.objective - 1e-9

    @pytest.mark.services
    @pytest.mark.integration
    @pytest.mark.parametrize("seed", range(5))
    def test_random_trades_are_not_optimal(self, seed):
        """Test that random level-preserving trades fail verification at the marginal prices."""
        pool = create_random_pool(seed, n=2, code="gm")
        rng = np.random.default_rng(seed)
        p = prices(pool.trade_function, pool.reserves)
        received = float(rng.uniform(0.1, 0.5)) * pool.reserves[0]
        trade = restore_level(pool, Trade(x=(received, 0.0), y=(0.0, 0.0)))
        report = verify_system(pool, LinearUtility(prices=tuple(p.tolist())), trade)
        assert report.verdict is Verdict.VIOLATED
