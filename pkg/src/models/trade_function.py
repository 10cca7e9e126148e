"""
Trade Function Models

Pydantic models describing the trade functions of a constant function market
maker: weighted arithmetic and geometric means and weighted quasi-arithmetic
means built from a mean generator. These models are declarative and immutable;
evaluation lives in ``src.services.trade_functions``.
"""

from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

WEIGHT_SUM_TOLERANCE = 1e-12


class GeneratorKind(str, Enum):
    """Mean generators f supported by the quasi-arithmetic trade function."""

    IDENTITY = "identity"
    LOG = "log"
    POWER_LOG = "power_log"
    EXP_SHIFT = "exp_shift"
    EXP_SUM = "exp_sum"


class TradeFunctionKind(str, Enum):
    """Families of trade functions."""

    ARITHMETIC = "arithmetic"
    GEOMETRIC = "geometric"
    QUASI_ARITHMETIC = "quasi_arithmetic"


class MeanGenerator(BaseModel):
    """
    Generator f of a weighted quasi-arithmetic mean.

    Attributes:
        kind: Generator family
        p: Shape parameter, required by ``power_log`` (p > 1) and ``exp_shift`` (p > 0)

    Generators:
        identity:  f(y) = y
        log:       f(y) = ln(y)
        power_log: f(y) = (y + 1)^p ln(y + 1)
        exp_shift: f(y) = (y + c)^p ln(y + c) + 1/(e p), c = e^(-1/p)
        exp_sum:   f(y) = y + e^y
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: GeneratorKind = Field(..., description="Generator family")
    p: float | None = Field(default=None, description="Shape parameter of the generator")

    @model_validator(mode="after")
    def validate_parameter(self) -> "MeanGenerator":
        """
        Validate the shape parameter against the generator family.

        Raises:
            ValueError: If p is missing, superfluous or out of range
        """
        if self.kind is GeneratorKind.POWER_LOG:
            if self.p is None or not self.p > 1.0:
                raise ValueError(f"power_log generator requires p > 1, got {self.p}")
        elif self.kind is GeneratorKind.EXP_SHIFT:
            if self.p is None or not self.p > 0.0:
                raise ValueError(f"exp_shift generator requires p > 0, got {self.p}")
        elif self.p is not None:
            raise ValueError(f"{self.kind.value} generator takes no parameter p")
        return self

    @classmethod
    def power_log(cls, p: float = 2.0) -> "MeanGenerator":
        return cls(kind=GeneratorKind.POWER_LOG, p=p)

    @classmethod
    def exp_shift(cls, p: float = 2.0) -> "MeanGenerator":
        return cls(kind=GeneratorKind.EXP_SHIFT, p=p)


class WeightVector(BaseModel):
    """
    Weights of a weighted mean.

    Attributes:
        weights: Strictly positive weights summing to one
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    weights: tuple[float, ...] = Field(..., min_length=1, description="Mean weights")

    @field_validator("weights")
    @classmethod
    def validate_weights(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        """
        Validate positivity and normalization of the weights.

        Raises:
            ValueError: If a weight is not positive or the weights do not sum to one
        """
        if any(not w > 0.0 for w in v):
            raise ValueError("All weights must be strictly positive")
        total = sum(v)
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ValueError(f"Weights must sum to 1, got {total!r}")
        return v

    @classmethod
    def uniform(cls, n: int) -> "WeightVector":
        """Equal weights 1/n."""
        if n < 1:
            raise ValueError("Dimension must be positive")
        return cls(weights=tuple([1.0 / n] * n))

    def __len__(self) -> int:
        return len(self.weights)


class TradeFunction(BaseModel):
    """
    Trade function phi of a constant function market maker.

    Attributes:
        kind: Mean family
        dimension: Number of assets n
        generator: Mean generator (quasi-arithmetic means only)
        weights: Mean weights, equal weights when omitted
        scale: Positive multiplier c, the trade function evaluates c * phi
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: TradeFunctionKind = Field(..., description="Mean family")
    dimension: int = Field(..., ge=1, description="Number of assets")
    generator: MeanGenerator | None = Field(default=None, description="Mean generator")
    weights: WeightVector | None = Field(default=None, description="Mean weights")
    scale: float = Field(default=1.0, gt=0.0, description="Positive multiplier of phi")

    @field_validator("weights", mode="before")
    @classmethod
    def coerce_weights(cls, v: Any) -> Any:
        """Accept a bare list of weights in configuration documents."""
        if isinstance(v, list | tuple):
            return {"weights": tuple(v)}
        return v

    @model_validator(mode="after")
    def validate_structure(self) -> "TradeFunction":
        """
        Validate generator presence and weight dimension.

        Raises:
            ValueError: If the generator does not match the kind or weights mismatch n
        """
        if self.kind is TradeFunctionKind.QUASI_ARITHMETIC and self.generator is None:
            raise ValueError("quasi_arithmetic trade function requires a generator")
        if self.kind is not TradeFunctionKind.QUASI_ARITHMETIC and self.generator is not None:
            raise ValueError(f"{self.kind.value} trade function takes no generator")
        if self.weights is not None and len(self.weights) != self.dimension:
            raise ValueError(
                f"Weight vector has length {len(self.weights)}, expected {self.dimension}"
            )
        return self

    @classmethod
    def arithmetic(cls, n: int) -> "TradeFunction":
        return cls(kind=TradeFunctionKind.ARITHMETIC, dimension=n)

    @classmethod
    def geometric(cls, n: int) -> "TradeFunction":
        return cls(kind=TradeFunctionKind.GEOMETRIC, dimension=n)

    @classmethod
    def quasi_arithmetic(
        cls,
        generator: MeanGenerator,
        n: int,
        weights: WeightVector | None = None,
    ) -> "TradeFunction":
        return cls(
            kind=TradeFunctionKind.QUASI_ARITHMETIC,
            dimension=n,
            generator=generator,
            weights=weights,
        )

    @classmethod
    def power_log(cls, p: float, n: int) -> "TradeFunction":
        """Equal-weight power-log mean, the Lambert-W trade function."""
        return cls.quasi_arithmetic(MeanGenerator.power_log(p), n)

    def weight_tuple(self) -> tuple[float, ...]:
        """Weights of the mean, equal weights when none were given."""
        if self.weights is None:
            return WeightVector.uniform(self.dimension).weights
        return self.weights.weights

    def with_scale(self, scale: float) -> "TradeFunction":
        """Copy of this trade function evaluating scale * phi."""
        return self.model_copy(update={"scale": scale})

    @property
    def effective_generator(self) -> GeneratorKind:
        """Generator equivalent to the mean family."""
        if self.kind is TradeFunctionKind.ARITHMETIC:
            return GeneratorKind.IDENTITY
        if self.kind is TradeFunctionKind.GEOMETRIC:
            return GeneratorKind.LOG
        assert self.generator is not None
        return self.generator.kind

    @property
    def declared_hypotheses(self) -> dict[str, bool]:
        """
        Hypotheses this trade function is known to satisfy.

        ``increasing`` and ``continuously_differentiable`` hold for every
        supported generator (f' > 0 on the open positive orthant). Convexity
        and concavity are only declared where they are classical results.
        """
        generator = self.effective_generator
        return {
            "increasing": True,
            "continuously_differentiable": True,
            "convex": generator is GeneratorKind.IDENTITY,
            "concave": generator in (GeneratorKind.IDENTITY, GeneratorKind.LOG),
        }
