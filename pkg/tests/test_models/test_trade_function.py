"""
Tests for trade function models.

Tests generator parameters, weight vectors and trade function structure.
"""

import pytest
from pydantic import ValidationError

from src.models import GeneratorKind, MeanGenerator, TradeFunction, TradeFunctionKind, WeightVector


class TestMeanGenerator:
    """Tests for mean generator validation."""

    @pytest.mark.models
    @pytest.mark.unit
    def test_power_log_requires_p_above_one(self):
        """Test that power_log rejects p <= 1 and a missing p."""
        assert MeanGenerator.power_log(2.0).p == 2.0
        with pytest.raises(ValidationError):
            MeanGenerator(kind=GeneratorKind.POWER_LOG, p=1.0)
        with pytest.raises(ValidationError):
            MeanGenerator(kind=GeneratorKind.POWER_LOG)

    @pytest.mark.models
    @pytest.mark.unit
    def test_exp_shift_requires_positive_p(self):
        """Test that exp_shift accepts p in (0, 1] but not p <= 0."""
        assert MeanGenerator.exp_shift(0.5).p == 0.5
        with pytest.raises(ValidationError):
            MeanGenerator(kind=GeneratorKind.EXP_SHIFT, p=0.0)

    @pytest.mark.models
    @pytest.mark.validation
    @pytest.mark.parametrize("kind", ["identity", "log", "exp_sum"])
    def test_parameter_free_generators_reject_p(self, kind):
        """Test that generators without a shape parameter reject one."""
        with pytest.raises(ValidationError):
            MeanGenerator(kind=kind, p=2.0)


class TestWeightVector:
    """Tests for weight vector validation."""

    @pytest.mark.models
    @pytest.mark.unit
    def test_uniform_weights(self):
        """Test equal weights of dimension 6."""
        weights = WeightVector.uniform(6)
        assert len(weights) == 6
        assert sum(weights.weights) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.models
    @pytest.mark.validation
    def test_weights_must_sum_to_one(self):
        """Test that unnormalized weights are rejected."""
        with pytest.raises(ValidationError, match="sum to 1"):
            WeightVector(weights=(0.5, 0.6))

    @pytest.mark.models
    @pytest.mark.validation
    def test_weights_must_be_positive(self):
        """Test that a zero weight is rejected."""
        with pytest.raises(ValidationError, match="positive"):
            WeightVector(weights=(1.0, 0.0))


class TestTradeFunction:
    """Tests for trade function structure."""

    @pytest.mark.models
    @pytest.mark.unit
    def test_factories(self):
        """Test the arithmetic, geometric and power-log factories."""
        assert TradeFunction.arithmetic(3).effective_generator is GeneratorKind.IDENTITY
        assert TradeFunction.geometric(3).effective_generator is GeneratorKind.LOG
        qm = TradeFunction.power_log(2.0, 6)
        assert qm.kind is TradeFunctionKind.QUASI_ARITHMETIC
        assert qm.effective_generator is GeneratorKind.POWER_LOG
        assert qm.weight_tuple() == pytest.approx((1.0 / 6.0,) * 6)

    @pytest.mark.models
    @pytest.mark.validation
    def test_quasi_arithmetic_requires_generator(self):
        """Test that a quasi-arithmetic mean without generator is rejected."""
        with pytest.raises(ValidationError, match="requires a generator"):
            TradeFunction(kind="quasi_arithmetic", dimension=3)

    @pytest.mark.models
    @pytest.mark.validation
    def test_classical_means_take_no_generator(self):
        """Test that arithmetic and geometric means reject a generator."""
        with pytest.raises(ValidationError, match="takes no generator"):
            TradeFunction(kind="geometric", dimension=2, generator={"kind": "log"})

    @pytest.mark.models
    @pytest.mark.validation
    def test_weight_dimension_mismatch(self):
        """Test that weights must match the dimension."""
        with pytest.raises(ValidationError, match="Weight vector has length"):
            TradeFunction(kind="arithmetic", dimension=3, weights=[0.5, 0.5])

    @pytest.mark.models
    @pytest.mark.unit
    def test_bare_weight_list_is_accepted(self):
        """Test that configuration documents may give weights as a list."""
        tf = TradeFunction.model_validate(
            {"kind": "arithmetic", "dimension": 2, "weights": [0.25, 0.75]}
        )
        assert tf.weight_tuple() == (0.25, 0.75)

    @pytest.mark.models
    @pytest.mark.unit
    def test_with_scale_and_hash(self):
        """Test that scaling copies and that equal trade functions hash equally."""
        tf = TradeFunction.power_log(2.0, 3)
        scaled = tf.with_scale(2.5)
        assert scaled.scale == 2.5
        assert tf.scale == 1.0
        assert hash(tf) == hash(TradeFunction.power_log(2.0, 3))
        with pytest.raises(ValidationError):
            TradeFunction(kind="arithmetic", dimension=2, scale=0.0)

    @pytest.mark.models
    @pytest.mark.unit
    def test_declared_hypotheses(self):
        """Test that convexity is only declared for classical results."""
        assert TradeFunction.arithmetic(2).declared_hypotheses["convex"]
        assert TradeFunction.geometric(2).declared_hypotheses["concave"]
        qm = TradeFunction.power_log(2.0, 2).declared_hypotheses
        assert qm["increasing"]
        assert not qm["convex"]
        assert not qm["concave"]
