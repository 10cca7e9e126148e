"""
Tests for sampled monotonicity, level-set and convexity certification.
"""

import numpy as np
import pytest

from src.models import TradeFunction
from src.services import DomainError
from src.services.trade_functions import (
    Evaluator,
    certify_monotone,
    certify_quasilinear_level_set,
    evaluate,
    midpoint_gap,
    probe_convexity,
)
from tests.fixtures.sample_pools import create_trade_function, load_convexity_witnesses


class DecreasingEvaluator:
    """Negated arithmetic mean, decreasing in every argument."""

    dimension = 3

    def value(self, x):
        return -float(np.mean(np.asarray(x, dtype=np.float64), axis=-1))

    def gradient(self, x):
        return np.full(self.dimension, -1.0 / self.dimension)


class TestCertifyMonotone:
    """Tests for the monotonicity certifier."""

    @pytest.mark.services
    @pytest.mark.unit
    @pytest.mark.parametrize("code", ["am", "gm", "qm"])
    def test_means_are_increasing(self, code):
        """Test that every supported mean passes."""
        report = certify_monotone(create_trade_function(code, 4), samples=500, seed=1)
        assert report.passed
        assert report.violations == 0
        assert report.property == "monotone"

    @pytest.mark.services
    @pytest.mark.unit
    def test_decreasing_function_fails(self):
        """Test that a decreasing evaluator is reported with witnesses."""
        evaluator = DecreasingEvaluator()
        assert isinstance(evaluator, Evaluator)
        report = certify_monotone(evaluator, samples=50)
        assert not report.passed
        assert report.violations == 50
        assert 0 < len(report.witnesses) <= 5

    @pytest.mark.services
    @pytest.mark.validation
    def test_invalid_box(self):
        """Test that the sampling box must be positive and ordered."""
        with pytest.raises(DomainError):
            certify_monotone(TradeFunction.arithmetic(2), box=(0.0, 1.0))
        with pytest.raises(DomainError):
            certify_monotone(TradeFunction.arithmetic(2), box=(2.0, 1.0))


class TestCertifyQuasilinearLevelSet:
    """Tests for the level-set orthogonality certifier."""

    @pytest.mark.services
    @pytest.mark.numerics
    def test_arithmetic_level_sets_are_flat(self):
        """Test that hyperplane level sets pass at a large step."""
        report = certify_quasilinear_level_set(
            TradeFunction.arithmetic(4), trials=500, step=1e-2, box=(0.5, 50.0)
        )
        assert report.passed
        assert report.max_residual <= 1e-6

    @pytest.mark.services
    @pytest.mark.numerics
    @pytest.mark.parametrize("code", ["gm", "qm"])
    def test_first_order_condition(self, code):
        """Test that the extrapolated residual vanishes for curved level sets."""
        report = certify_quasilinear_level_set(
            create_trade_function(code, 4), trials=500, box=(0.5, 20.0)
        )
        assert report.passed
        assert report.max_residual <= 1e-6
        assert report.skipped < 50

    @pytest.mark.services
    @pytest.mark.numerics
    def test_finite_step_detects_curvature(self):
        """Test that a large raw step exposes curved level sets."""
        report = certify_quasilinear_level_set(
            TradeFunction.geometric(4),
            trials=100,
            step=0.3,
            extrapolate=False,
            box=(0.5, 20.0),
        )
        assert not report.passed
        assert report.violations > 0
        assert report.witnesses

    @pytest.mark.services
    @pytest.mark.numerics
    @pytest.mark.parametrize("code", ["gm", "qm"])
    def test_raw_residual_is_reported(self, code):
        """Test that curved level sets show an unextrapolated residual at the default step."""
        trade_function = create_trade_function(code, 4)
        report = certify_quasilinear_level_set(trade_function, trials=200, box=(0.5, 20.0))
        assert report.passed
        assert report.raw_max_residual > 1e-7
        assert report.raw_max_residual > 10.0 * report.max_residual

        raw = certify_quasilinear_level_set(
            trade_function, trials=200, box=(0.5, 20.0), extrapolate=False, tol=1.0
        )
        assert raw.raw_max_residual == raw.max_residual
        assert raw.raw_max_residual >= report.raw_max_residual

    @pytest.mark.services
    @pytest.mark.numerics
    def test_raw_residual_of_flat_level_sets(self):
        """Test that hyperplane level sets have a negligible raw residual."""
        report = certify_quasilinear_level_set(TradeFunction.arithmetic(4), trials=200, box=(0.5, 20.0))
        assert report.raw_max_residual <= 1e-8
        assert certify_monotone(TradeFunction.arithmetic(4), trials=10).raw_max_residual is None

    @pytest.mark.services
    @pytest.mark.validation
    @pytest.mark.parametrize("step", [0.0, 0.5])
    def test_invalid_step(self, step):
        """Test that the tangent step must lie in (0, 0.4]."""
        with pytest.raises(DomainError):
            certify_quasilinear_level_set(TradeFunction.arithmetic(2), step=step)


class TestProbeConvexity:
    """Tests for midpoint convexity probes."""

    @pytest.mark.services
    @pytest.mark.unit
    def test_arithmetic_is_affine(self):
        """Test that the arithmetic mean has no violations of either kind."""
        report = probe_convexity(TradeFunction.arithmetic(6), trials=2000)
        assert report.convexity_violations == 0
        assert report.concavity_violations == 0

    @pytest.mark.services
    @pytest.mark.unit
    def test_geometric_is_concave(self):
        """Test that the geometric mean only places midpoints above the chord."""
        report = probe_convexity(TradeFunction.geometric(6), trials=2000)
        assert report.concavity_violations == 0
        assert report.convexity_violations > 0
        assert report.convexity_witness is not None

    @pytest.mark.services
    @pytest.mark.numerics
    def test_power_log_is_neither(self):
        """Test that the power-log mean violates both convexity and concavity."""
        tf = create_trade_function("qm", 6)
        wide = probe_convexity(tf, trials=2000)
        assert wide.concavity_violations > 0
        targeted = probe_convexity(
            tf,
            trials=2000,
            box=((20.0, 0.01, 0.01, 0.01, 0.01, 0.01), (50.0, 0.02, 0.02, 0.02, 0.02, 0.02)),
        )
        assert targeted.convexity_violations > 0
        assert targeted.convexity_witness.gap > 0.0

    @pytest.mark.services
    @pytest.mark.numerics
    def test_persisted_witnesses(self):
        """Test the stored midpoint witnesses of the six-asset power-log mean."""
        data = load_convexity_witnesses()
        tf = TradeFunction.model_validate(data["trade_function"])
        for kind, sign in (("convexity", 1.0), ("concavity", -1.0)):
            witness = data[kind]
            a = np.asarray(witness["a"])
            b = np.asarray(witness["b"])
            gap = midpoint_gap(tf, a, b)
            assert sign * gap > 0.0
            assert evaluate(tf, 0.5 * (a + b)) == pytest.approx(witness["midpoint_value"], abs=1e-3)
            assert gap == pytest.approx(
                witness["midpoint_value"] - witness["chord_average"], abs=2e-3
            )
