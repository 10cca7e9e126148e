"""
Market Models

Pool state, trades and linear utilities of a constant function market maker.
A pool holds reserves R, per-asset fee factors gamma and a trade function phi.
A trade is a pair of nonnegative vectors: x is received from the pool by the
trader, y is tendered to the pool. The post-trade reserves are
R + Gamma y - x.
"""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.models.trade_function import TradeFunction


class FeeSchedule(BaseModel):
    """
    Per-asset fee factors.

    Attributes:
        gamma: Fee factors gamma_i in (0, 1); the pool credits gamma_i y_i of a tender y_i
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    gamma: tuple[float, ...] = Field(..., min_length=1, description="Fee factors in (0, 1)")

    @field_validator("gamma")
    @classmethod
    def validate_gamma(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        """
        Validate that every fee factor lies in the open unit interval.

        Raises:
            ValueError: If a factor is outside (0, 1)
        """
        for i, g in enumerate(v):
            if not 0.0 < g < 1.0:
                raise ValueError(f"Fee factor gamma[{i}] must lie in (0, 1), got {g}")
        return v

    @classmethod
    def uniform(cls, gamma: float, n: int) -> "FeeSchedule":
        return cls(gamma=tuple([gamma] * n))

    def __len__(self) -> int:
        return len(self.gamma)


class Pool(BaseModel):
    """
    Pool state of a constant function market maker.

    Attributes:
        reserves: Strictly positive reserves R
        fees: Fee schedule gamma, one factor per asset
        trade_function: Trade function phi of dimension n
        numeraire: Index of the numeraire asset, the last asset when omitted
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    reserves: tuple[float, ...] = Field(..., min_length=1, description="Reserves R")
    fees: FeeSchedule = Field(..., description="Fee schedule")
    trade_function: TradeFunction = Field(..., description="Trade function phi")
    numeraire: int | None = Field(default=None, ge=0, description="Numeraire index")

    @model_validator(mode="before")
    @classmethod
    def expand_shorthand(cls, data: Any) -> Any:
        """
        Expand configuration shorthands.

        A scalar ``fees`` becomes a uniform schedule and a trade function
        without ``dimension`` takes the number of reserves.
        """
        if not isinstance(data, dict) or "reserves" not in data:
            return data
        data = dict(data)
        n = len(data["reserves"])
        fees = data.get("fees")
        if isinstance(fees, int | float):
            data["fees"] = {"gamma": [float(fees)] * n}
        elif isinstance(fees, list | tuple):
            data["fees"] = {"gamma": list(fees)}
        tf = data.get("trade_function")
        if isinstance(tf, dict) and "dimension" not in tf:
            data["trade_function"] = {**tf, "dimension": n}
        return data

    @field_validator("reserves")
    @classmethod
    def validate_reserves(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        """
        Validate that all reserves are strictly positive.

        Raises:
            ValueError: If a reserve is not strictly positive
        """
        for i, r in enumerate(v):
            if not r > 0.0:
                raise ValueError(f"Reserve R[{i}] must be strictly positive, got {r}")
        return v

    @model_validator(mode="after")
    def validate_dimensions(self) -> "Pool":
        """
        Validate that reserves, fees and trade function share one dimension.

        Raises:
            ValueError: On a dimension mismatch or an out-of-range numeraire
        """
        n = len(self.reserves)
        if len(self.fees) != n:
            raise ValueError(f"Fee schedule has {len(self.fees)} factors for {n} assets")
        if self.trade_function.dimension != n:
            raise ValueError(
                f"Trade function has dimension {self.trade_function.dimension} for {n} assets"
            )
        if self.numeraire is not None and self.numeraire >= n:
            raise ValueError(f"Numeraire index {self.numeraire} out of range for {n} assets")
        return self

    @property
    def dimension(self) -> int:
        return len(self.reserves)

    @property
    def numeraire_index(self) -> int:
        """Resolved numeraire index."""
        return self.dimension - 1 if self.numeraire is None else self.numeraire

    def with_trade_function(self, trade_function: TradeFunction) -> "Pool":
        return self.model_copy(update={"trade_function": trade_function})


class Trade(BaseModel):
    """
    Trade against a pool.

    Attributes:
        x: Amounts received by the trader from the pool
        y: Amounts tendered by the trader to the pool
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    x: tuple[float, ...] = Field(..., min_length=1, description="Received amounts")
    y: tuple[float, ...] = Field(..., min_length=1, description="Tendered amounts")

    @model_validator(mode="after")
    def validate_lengths(self) -> "Trade":
        if len(self.x) != len(self.y):
            raise ValueError(f"x has length {len(self.x)} but y has length {len(self.y)}")
        return self

    @classmethod
    def zero(cls, n: int) -> "Trade":
        return cls(x=tuple([0.0] * n), y=tuple([0.0] * n))

    @classmethod
    def from_net(cls, net: tuple[float, ...] | list[float]) -> "Trade":
        """Complementary trade with x - y equal to the given net amounts."""
        return cls(
            x=tuple(max(z, 0.0) for z in net),
            y=tuple(max(-z, 0.0) for z in net),
        )

    @property
    def dimension(self) -> int:
        return len(self.x)

    @property
    def net(self) -> tuple[float, ...]:
        """Net amounts x - y received by the trader."""
        return tuple(xi - yi for xi, yi in zip(self.x, self.y, strict=True))

    @property
    def is_zero(self) -> bool:
        return not any(self.x) and not any(self.y)


class LinearUtility(BaseModel):
    """
    Linear utility U(z) = pi . z of the trader.

    Attributes:
        prices: Nonnegative, not all zero, marginal values pi
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    prices: tuple[float, ...] = Field(..., min_length=1, description="Marginal values pi")

    @field_validator("prices")
    @classmethod
    def validate_prices(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        """
        Validate nonnegativity and that at least one value is positive.

        Raises:
            ValueError: If a value is negative or all values are zero
        """
        if any(not pi >= 0.0 for pi in v):
            raise ValueError("Utility prices must be nonnegative")
        if not any(pi > 0.0 for pi in v):
            raise ValueError("Utility prices must not all be zero")
        return v

    def value(self, net: tuple[float, ...] | list[float]) -> float:
        return float(sum(pi * z for pi, z in zip(self.prices, net, strict=True)))

    def gradient(self, net: tuple[float, ...] | list[float] | None = None) -> tuple[float, ...]:
        """Gradient of the utility, constant for a linear utility."""
        return self.prices

    def perturbed(self, index: int, factor: float) -> "LinearUtility":
        """Copy with prices[index] multiplied by factor."""
        prices = list(self.prices)
        prices[index] *= factor
        return LinearUtility(prices=tuple(prices))


class FeasibilityViolation(BaseModel):
    """Single violated feasibility condition of a trade."""

    kind: str = Field(..., description="Violated condition")
    index: int | None = Field(default=None, description="Asset index, if any")
    magnitude: float = Field(..., description="Size of the violation")


class FeasibilityReport(BaseModel):
    """
    Feasibility of a trade against a pool.

    Attributes:
        feasible: True when no condition is violated beyond tolerance
        violations: Violated conditions
        level_residual: Relative level constraint residual |phi(R') - phi(R)| / max(1, |phi(R)|)
    """

    feasible: bool = Field(..., description="Trade is feasible")
    violations: list[FeasibilityViolation] = Field(default_factory=list)
    level_residual: float = Field(..., description="Relative level constraint residual")
