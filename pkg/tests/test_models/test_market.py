"""
Tests for market models.

Tests pools, fee schedules, trades and linear utilities.
"""

import pytest
from pydantic import ValidationError

from src.models import FeeSchedule, LinearUtility, Pool, Trade, TradeFunction
from tests.fixtures.sample_pools import REFERENCE_RESERVES


class TestFeeSchedule:
    """Tests for fee schedule validation."""

    @pytest.mark.models
    @pytest.mark.validation
    @pytest.mark.parametrize("gamma", [0.0, 1.0, 1.5, -0.1])
    def test_fee_factor_outside_unit_interval(self, gamma):
        """Test that fee factors must lie in the open unit interval."""
        with pytest.raises(ValidationError, match="must lie in"):
            FeeSchedule(gamma=(0.9, gamma))

    @pytest.mark.models
    @pytest.mark.unit
    def test_uniform(self):
        """Test a uniform schedule."""
        fees = FeeSchedule.uniform(0.9, 4)
        assert len(fees) == 4
        assert set(fees.gamma) == {0.9}


class TestPool:
    """Tests for pool construction."""

    @pytest.mark.models
    @pytest.mark.unit
    def test_shorthand_expansion(self):
        """Test scalar fees and a trade function without dimension."""
        pool = Pool.model_validate(
            {
                "reserves": list(REFERENCE_RESERVES),
                "fees": 0.9,
                "trade_function": {"kind": "geometric"},
            }
        )
        assert pool.dimension == 6
        assert pool.fees.gamma == (0.9,) * 6
        assert pool.trade_function.dimension == 6
        assert pool.numeraire_index == 5

    @pytest.mark.models
    @pytest.mark.unit
    def test_fee_list_shorthand(self):
        """Test per-asset fees given as a list."""
        pool = Pool.model_validate(
            {"reserves": [1.0, 2.0], "fees": [0.5, 0.9], "trade_function": {"kind": "arithmetic"}}
        )
        assert pool.fees.gamma == (0.5, 0.9)

    @pytest.mark.models
    @pytest.mark.validation
    def test_nonpositive_reserve(self):
        """Test that reserves must be strictly positive."""
        with pytest.raises(ValidationError, match="strictly positive"):
            Pool(
                reserves=(1.0, 0.0),
                fees=FeeSchedule.uniform(0.9, 2),
                trade_function=TradeFunction.arithmetic(2),
            )

    @pytest.mark.models
    @pytest.mark.validation
    def test_dimension_mismatch(self):
        """Test that the trade function dimension must match the reserves."""
        with pytest.raises(ValidationError, match="dimension"):
            Pool(
                reserves=(1.0, 2.0),
                fees=FeeSchedule.uniform(0.9, 2),
                trade_function=TradeFunction.arithmetic(3),
            )

    @pytest.mark.models
    @pytest.mark.validation
    def test_numeraire_out_of_range(self):
        """Test that the numeraire index must address an asset."""
        with pytest.raises(ValidationError, match="Numeraire index"):
            Pool(
                reserves=(1.0, 2.0),
                fees=FeeSchedule.uniform(0.9, 2),
                trade_function=TradeFunction.arithmetic(2),
                numeraire=2,
            )

    @pytest.mark.models
    @pytest.mark.unit
    def test_with_trade_function(self, qm_pool):
        """Test swapping the trade function keeps the pool state."""
        swapped = qm_pool.with_trade_function(TradeFunction.geometric(6))
        assert swapped.reserves == qm_pool.reserves
        assert swapped.trade_function.kind.value == "geometric"


class TestTrade:
    """Tests for trades."""

    @pytest.mark.models
    @pytest.mark.unit
    def test_from_net_is_complementary(self):
        """Test that a trade built from net amounts never both receives and tenders."""
        trade = Trade.from_net([0.5, -1.0, 0.0])
        assert trade.x == (0.5, 0.0, 0.0)
        assert trade.y == (0.0, 1.0, 0.0)
        assert trade.net == (0.5, -1.0, 0.0)

    @pytest.mark.models
    @pytest.mark.unit
    def test_zero(self):
        """Test the zero trade."""
        assert Trade.zero(3).is_zero
        assert not Trade.from_net([0.0, 1e-3]).is_zero

    @pytest.mark.models
    @pytest.mark.validation
    def test_length_mismatch(self):
        """Test that x and y must have equal length."""
        with pytest.raises(ValidationError, match="length"):
            Trade(x=(1.0, 0.0), y=(0.0,))


class TestLinearUtility:
    """Tests for linear utilities."""

    @pytest.mark.models
    @pytest.mark.validation
    def test_negative_price(self):
        """Test that utility prices must be nonnegative."""
        with pytest.raises(ValidationError, match="nonnegative"):
            LinearUtility(prices=(1.0, -0.5))

    @pytest.mark.models
    @pytest.mark.validation
    def test_all_zero(self):
        """Test that utility prices must not all vanish."""
        with pytest.raises(ValidationError, match="all be zero"):
            LinearUtility(prices=(0.0, 0.0))

    @pytest.mark.models
    @pytest.mark.unit
    def test_value_gradient_and_perturbation(self):
        """Test evaluation, gradient and scaling of one price."""
        utility = LinearUtility(prices=(2.0, 1.0))
        assert utility.value([1.0, -3.0]) == pytest.approx(-1.0)
        assert utility.gradient() == (2.0, 1.0)
        assert utility.perturbed(0, 1.5).prices == (3.0, 1.0)
