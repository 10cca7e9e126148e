"""
Trade function evaluation, prices and property certification.

Evaluates weighted arithmetic, geometric and quasi-arithmetic means with
analytic gradients. Closed-form inverses of the generators use the Lambert W
and Wright omega functions; a bracketed root finder provides an independent
inverse for cross-checks. The sampled certifiers accept any object honoring
the ``Evaluator`` protocol, so general utilities and deliberately broken
functions can be audited with the same code.
"""

import logging
import math
from collections.abc import Sequence
from functools import lru_cache
from typing import Protocol, runtime_checkable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import optimize

from src.models.reports import CertificationReport, CertificationWitness, ConvexityReport
from src.models.trade_function import GeneratorKind, MeanGenerator, TradeFunction
from src.services.errors import CFMMError, DomainError, NumeraireError, RootFindError
from src.services.special_functions import lambert_w0, lambert_w0_prime, wright_omega

logger = logging.getLogger(__name__)

Box = tuple[float | Sequence[float], float | Sequence[float]]

DEFAULT_BOX: Box = (0.01, 50.0)
MAX_WITNESSES = 5
NUMERAIRE_FLOOR = 1e-12


@runtime_checkable
class Evaluator(Protocol):
    """Scalar function of n variables with an analytic gradient."""

    dimension: int

    def value(self, x: ArrayLike) -> float | NDArray[np.float64]: ...

    def gradient(self, x: ArrayLike) -> NDArray[np.float64]: ...


def generator_value(generator: MeanGenerator, y: ArrayLike) -> NDArray[np.float64]:
    """Generator f applied elementwise."""
    y = np.asarray(y, dtype=np.float64)
    match generator.kind:
        case GeneratorKind.IDENTITY:
            return y
        case GeneratorKind.LOG:
            return np.log(y)
        case GeneratorKind.POWER_LOG:
            u = y + 1.0
            return u**generator.p * np.log(u)
        case GeneratorKind.EXP_SHIFT:
            assert generator.p is not None
            p = generator.p
            u = y + math.exp(-1.0 / p)
            return u**p * np.log(u) + 1.0 / (math.e * p)
        case GeneratorKind.EXP_SUM:
            return y + np.exp(y)


def generator_derivative(generator: MeanGenerator, y: ArrayLike) -> NDArray[np.float64]:
    """Derivative f' applied elementwise."""
    y = np.asarray(y, dtype=np.float64)
    match generator.kind:
        case GeneratorKind.IDENTITY:
            return np.ones_like(y)
        case GeneratorKind.LOG:
            return 1.0 / y
        case GeneratorKind.POWER_LOG | GeneratorKind.EXP_SHIFT:
            assert generator.p is not None
            p = generator.p
            shift = 1.0 if generator.kind is GeneratorKind.POWER_LOG else math.exp(-1.0 / p)
            u = y + shift
            return u ** (p - 1.0) * (p * np.log(u) + 1.0)
        case GeneratorKind.EXP_SUM:
            return 1.0 + np.exp(y)


def invert_generator(
    generator: MeanGenerator,
    s: float,
    bracket: tuple[float, float],
) -> float:
    """
    Solve f(m) = s for m by bracketed root finding.

    Independent of the closed-form inverses, used to cross-check them.

    Raises:
        RootFindError: If f - s does not change sign on the bracket
    """
    lo, hi = bracket

    def residual(m: float) -> float:
        return float(generator_value(generator, m)) - s

    r_lo, r_hi = residual(lo), residual(hi)
    if r_lo == 0.0:
        return lo
    if r_hi == 0.0:
        return hi
    if r_lo * r_hi > 0.0:
        raise RootFindError(f"f(m) = {s!r} is not bracketed on [{lo!r}, {hi!r}]")
    return float(optimize.brentq(residual, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))


class MeanEvaluator:
    """
    Evaluator of a trade function.

    ``value`` accepts a single point of shape (n,) or a batch of shape (m, n).
    """

    def __init__(self, trade_function: TradeFunction):
        self.trade_function = trade_function
        self.dimension = trade_function.dimension
        self.weights = np.asarray(trade_function.weight_tuple(), dtype=np.float64)
        self.scale = trade_function.scale
        self.generator = trade_function.generator or MeanGenerator(
            kind=trade_function.effective_generator
        )
        self.kind = self.generator.kind
        self.p = self.generator.p

    def _check(self, x: ArrayLike) -> NDArray[np.float64]:
        arr = np.asarray(x, dtype=np.float64)
        if arr.shape[-1] != self.dimension:
            raise DomainError(f"Expected {self.dimension} components, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("Trade function arguments must be finite")
        if self.kind in (GeneratorKind.LOG, GeneratorKind.POWER_LOG):
            if np.any(arr <= 0.0):
                raise DomainError(
                    f"{self.trade_function.kind.value} trade function requires strictly "
                    f"positive arguments"
                )
        elif np.any(arr < 0.0):
            raise DomainError("Trade function arguments must be nonnegative")
        return arr

    def _aggregate(self, arr: NDArray[np.float64]) -> NDArray[np.float64]:
        """Weighted generator sum, or its transformed equivalent for closed-form inverses."""
        match self.kind:
            case GeneratorKind.IDENTITY:
                return arr @ self.weights
            case GeneratorKind.LOG:
                return np.log(arr) @ self.weights
            case GeneratorKind.POWER_LOG:
                assert self.p is not None
                u = arr + 1.0
                return self.p * ((u**self.p * np.log(u)) @ self.weights)
            case GeneratorKind.EXP_SHIFT:
                # p S - 1/e, which equals p * sum w u^p ln u exactly
                assert self.p is not None
                u = arr + math.exp(-1.0 / self.p)
                return self.p * ((u**self.p * np.log(u)) @ self.weights)
            case GeneratorKind.EXP_SUM:
                return (arr + np.exp(arr)) @ self.weights

    def _mean(self, aggregate: NDArray[np.float64]) -> NDArray[np.float64]:
        match self.kind:
            case GeneratorKind.IDENTITY:
                return aggregate
            case GeneratorKind.LOG:
                return np.exp(aggregate)
            case GeneratorKind.POWER_LOG:
                assert self.p is not None
                return np.expm1(np.asarray(lambert_w0(aggregate)) / self.p)
            case GeneratorKind.EXP_SHIFT:
                assert self.p is not None
                w = np.asarray(lambert_w0(aggregate))
                return np.exp(w / self.p) - math.exp(-1.0 / self.p)
            case GeneratorKind.EXP_SUM:
                return np.log(np.asarray(wright_omega(aggregate)))

    def value(self, x: ArrayLike) -> float | NDArray[np.float64]:
        """Trade function value c * phi(x)."""
        arr = self._check(x)
        result = self.scale * self._mean(self._aggregate(arr))
        if np.ndim(result) == 0:
            return float(result)
        return result

    def gradient(self, x: ArrayLike) -> NDArray[np.float64]:
        """
        Analytic gradient of c * phi at a single point.

        Raises:
            DomainError: If x is outside the domain of phi
        """
        arr = self._check(x)
        if arr.ndim != 1:
            raise DomainError("gradient expects a single point")
        w = self.weights
        match self.kind:
            case GeneratorKind.IDENTITY:
                grad = w.copy()
            case GeneratorKind.LOG:
                grad = float(self._mean(self._aggregate(arr))) * w / arr
            case GeneratorKind.POWER_LOG | GeneratorKind.EXP_SHIFT:
                assert self.p is not None
                aggregate = float(self._aggregate(arr))
                outer = math.exp(float(lambert_w0(aggregate)) / self.p)
                outer *= float(lambert_w0_prime(aggregate))
                grad = outer * w * generator_derivative(self.generator, arr)
            case GeneratorKind.EXP_SUM:
                phi = float(self._mean(self._aggregate(arr)))
                grad = w * (1.0 + np.exp(arr)) / (1.0 + math.exp(phi))
        return self.scale * grad

    def gradient_from_generator(self, x: ArrayLike) -> NDArray[np.float64]:
        """Gradient through the identity w_i f'(x_i) / f'(phi(x))."""
        arr = self._check(x)
        phi = float(self.value(arr)) / self.scale
        denominator = float(generator_derivative(self.generator, phi))
        return self.scale * self.weights * generator_derivative(self.generator, arr) / denominator

    def value_by_root_finding(self, x: ArrayLike) -> float:
        """Mean computed by inverting the generator numerically on [min x, max x]."""
        arr = self._check(x)
        s = float(generator_value(self.generator, arr) @ self.weights)
        lo, hi = float(arr.min()), float(arr.max())
        if lo == hi:
            return self.scale * lo
        return self.scale * invert_generator(self.generator, s, (lo, hi))


@lru_cache(maxsize=128)
def evaluator_for(trade_function: TradeFunction) -> MeanEvaluator:
    return MeanEvaluator(trade_function)


def as_evaluator(function: TradeFunction | Evaluator) -> Evaluator:
    if isinstance(function, TradeFunction):
        return evaluator_for(function)
    return function


def evaluate(trade_function: TradeFunction, x: ArrayLike) -> float:
    """
    Evaluate phi at a point.

    Raises:
        DomainError: If x is outside the domain of phi
    """
    return float(evaluator_for(trade_function).value(x))


def gradient(trade_function: TradeFunction, x: ArrayLike) -> NDArray[np.float64]:
    """Analytic gradient of phi at a point."""
    return evaluator_for(trade_function).gradient(x)


def prices(
    trade_function: TradeFunction,
    reserves: ArrayLike,
    numeraire: int | None = None,
) -> NDArray[np.float64]:
    """
    Marginal prices p = grad phi(R) / d_k phi(R) for numeraire k.

    Args:
        trade_function: Trade function phi
        reserves: Reserves R
        numeraire: Numeraire index, the last asset when omitted

    Returns:
        Price vector with p[numeraire] == 1

    Raises:
        NumeraireError: If the numeraire gradient component vanishes relative to the gradient
    """
    grad = gradient(trade_function, reserves)
    k = len(grad) - 1 if numeraire is None else numeraire
    if not grad[k] > NUMERAIRE_FLOOR * float(np.abs(grad).max()):
        raise NumeraireError(f"Gradient component of numeraire {k} is {grad[k]!r}")
    p = grad / grad[k]
    p[k] = 1.0
    return p


def _box_bounds(box: Box, n: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    lo = np.broadcast_to(np.asarray(box[0], dtype=np.float64), (n,)).copy()
    hi = np.broadcast_to(np.asarray(box[1], dtype=np.float64), (n,)).copy()
    if np.any(lo <= 0.0) or np.any(hi <= lo):
        raise DomainError("Sampling box must satisfy 0 < lower < upper")
    return lo, hi


def certify_monotone(
    function: TradeFunction | Evaluator,
    samples: int = 1000,
    seed: int = 0,
    box: Box = DEFAULT_BOX,
    tol: float = 1e-12,
) -> CertificationReport:
    """
    Sample pairs x >= y in a box and check phi(x) >= phi(y) and grad phi(y) >= 0.

    Args:
        function: Trade function or evaluator
        samples: Number of sampled pairs
        seed: Seed of the sampler
        box: Sampling box, scalars or per-coordinate bounds
        tol: Relative tolerance on decreases

    Returns:
        Certification report with the first violating pairs as witnesses
    """
    ev = as_evaluator(function)
    n = ev.dimension
    lo, hi = _box_bounds(box, n)
    rng = np.random.default_rng(seed)

    violations = skipped = 0
    max_residual = 0.0
    witnesses: list[CertificationWitness] = []
    for _ in range(samples):
        y = rng.uniform(lo, hi)
        mask = rng.random(n) < 0.5
        if not mask.any():
            mask[rng.integers(n)] = True
        x = y + mask * rng.uniform(0.0, 1.0, n) * (hi - y)
        try:
            fy = float(ev.value(y))
            fx = float(ev.value(x))
            g = np.asarray(ev.gradient(y))
        except CFMMError:
            skipped += 1
            continue

        decrease = (fy - fx) / max(1.0, abs(fy))
        negative_slope = -float(g.min()) / max(1.0, float(np.linalg.norm(g)))
        residual = max(decrease, negative_slope, 0.0)
        max_residual = max(max_residual, residual)
        if decrease > tol or negative_slope > tol or not g.max() > 0.0:
            violations += 1
            if len(witnesses) < MAX_WITNESSES:
                witnesses.append(CertificationWitness(a=y.tolist(), b=x.tolist(), gap=residual))

    if violations:
        logger.warning(f"Monotonicity violated in {violations}/{samples} samples")
    return CertificationReport(
        property="monotone",
        trials=samples,
        violations=violations,
        skipped=skipped,
        max_residual=max_residual,
        passed=violations == 0,
        witnesses=witnesses,
    )


def _level_set_residual(
    ev: Evaluator,
    y: NDArray[np.float64],
    grad: NDArray[np.float64],
    tangent: NDArray[np.float64],
    normal: NDArray[np.float64],
    step: float,
) -> float:
    """
    Signed cosine between grad phi(y) and x - y for a point x on the level set of y.

    x = y * (1 + step * tangent + tau * normal), with tau found by root finding.
    """
    target = float(ev.value(y))

    def offset(tau: float) -> NDArray[np.float64]:
        return step * tangent + tau * normal

    def residual(tau: float) -> float:
        return float(ev.value(y * (1.0 + offset(tau)))) - target

    lo, hi = -0.5, 0.5
    r_lo, r_hi = residual(lo), residual(hi)
    if r_lo * r_hi > 0.0:
        raise RootFindError("No level-set crossing bracketed along the normal direction")
    tau = float(optimize.brentq(residual, lo, hi, xtol=1e-18, rtol=4 * np.finfo(float).eps))
    d = y * offset(tau)
    return float(grad @ d) / (float(np.linalg.norm(grad)) * float(np.linalg.norm(d)))


def certify_quasilinear_level_set(
    function: TradeFunction | Evaluator,
    trials: int = 1000,
    seed: int = 0,
    tol: float = 1e-6,
    box: Box = DEFAULT_BOX,
    step: float = 1e-4,
    extrapolate: bool = True,
) -> CertificationReport:
    """
    Check that grad phi(y) is orthogonal to x - y for points x on the level set of y.

    Each trial samples y in the box and a random direction tangent to the
    level set at y (in coordinates scaled by y). The point x is found by root
    finding along the scaled normal so that phi(x) = phi(y) exactly, and the
    residual is the cosine between grad phi(y) and x - y. With ``extrapolate``
    the residual is Richardson-extrapolated from steps h and h/2 towards the
    first-order limit; without it, a large ``step`` measures how far the level
    set bends away from the tangent plane. Hyperplane level sets give zero
    residual at any step.

    The report always carries the largest unextrapolated residual at ``step``
    as ``raw_max_residual``, so curvature of the level sets stays visible when
    the verdict uses the extrapolated value.

    Args:
        function: Trade function or evaluator
        trials: Number of trials
        seed: Seed of the sampler
        tol: Residual accepted as passing
        box: Sampling box of y
        step: Relative tangent excursion h, at most 0.4
        extrapolate: Extrapolate the residual to zero step

    Returns:
        Certification report; trials without a bracketed crossing count as skipped
    """
    if not 0.0 < step <= 0.4:
        raise DomainError(f"step must lie in (0, 0.4], got {step}")
    ev = as_evaluator(function)
    n = ev.dimension
    lo, hi = _box_bounds(box, n)
    rng = np.random.default_rng(seed)

    violations = skipped = 0
    max_residual = raw_max_residual = 0.0
    witnesses: list[CertificationWitness] = []
    for _ in range(trials):
        y = rng.uniform(lo, hi)
        direction = rng.standard_normal(n)
        try:
            grad = np.asarray(ev.gradient(y))
            scaled = grad * y
            norm = float(np.linalg.norm(scaled))
            if norm == 0.0 or np.any(scaled < 0.0):
                raise RootFindError("Scaled gradient is not a positive direction")
            normal = scaled / norm
            tangent = direction - (direction @ normal) * normal
            length = float(np.linalg.norm(tangent))
            if length < 1e-12:
                raise RootFindError("Level set has no tangent direction")
            tangent /= length
            rho = _level_set_residual(ev, y, grad, tangent, normal, step)
            raw_residual = abs(rho)
            if extrapolate:
                rho_half = _level_set_residual(ev, y, grad, tangent, normal, step / 2.0)
                rho = 2.0 * rho_half - rho
        except CFMMError as e:
            logger.debug(f"Level-set trial skipped: {e}")
            skipped += 1
            continue

        residual = abs(rho)
        max_residual = max(max_residual, residual)
        raw_max_residual = max(raw_max_residual, raw_residual)
        if residual > tol:
            violations += 1
            if len(witnesses) < MAX_WITNESSES:
                x = y * (1.0 + step * tangent)
                witnesses.append(CertificationWitness(a=y.tolist(), b=x.tolist(), gap=residual))

    return CertificationReport(
        property="quasilinear_level_set",
        trials=trials,
        violations=violations,
        skipped=skipped,
        max_residual=max_residual,
        raw_max_residual=raw_max_residual,
        passed=violations == 0,
        witnesses=witnesses,
    )


def midpoint_gap(function: TradeFunction | Evaluator, a: ArrayLike, b: ArrayLike) -> float:
    """phi((a + b) / 2) minus the chord average (phi(a) + phi(b)) / 2."""
    ev = as_evaluator(function)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    mid = float(ev.value(0.5 * (a + b)))
    return mid - 0.5 * (float(ev.value(a)) + float(ev.value(b)))


def probe_convexity(
    function: TradeFunction | Evaluator,
    trials: int = 10_000,
    seed: int = 0,
    box: Box = DEFAULT_BOX,
    tol: float = 1e-12,
) -> ConvexityReport:
    """
    Random midpoint tests for convexity and concavity.

    A midpoint value above the chord average violates convexity, one below
    it violates concavity. Gaps within tol * max(1, |average|) are ignored.

    Returns:
        Counts of both violation kinds and the largest witness of each
    """
    ev = as_evaluator(function)
    n = ev.dimension
    lo, hi = _box_bounds(box, n)
    rng = np.random.default_rng(seed)

    convex_count = concave_count = 0
    convex_witness: CertificationWitness | None = None
    concave_witness: CertificationWitness | None = None
    for _ in range(trials):
        a = rng.uniform(lo, hi)
        b = rng.uniform(lo, hi)
        avg = 0.5 * (float(ev.value(a)) + float(ev.value(b)))
        gap = float(ev.value(0.5 * (a + b))) - avg
        threshold = tol * max(1.0, abs(avg))
        if gap > threshold:
            convex_count += 1
            if convex_witness is None or gap > convex_witness.gap:
                convex_witness = CertificationWitness(a=a.tolist(), b=b.tolist(), gap=gap)
        elif gap < -threshold:
            concave_count += 1
            if concave_witness is None or -gap > concave_witness.gap:
                concave_witness = CertificationWitness(a=a.tolist(), b=b.tolist(), gap=-gap)

    logger.info(
        f"Convexity probe: {convex_count} convexity and {concave_count} concavity "
        f"violations in {trials} trials"
    )
    return ConvexityReport(
        trials=trials,
        convexity_violations=convex_count,
        concavity_violations=concave_count,
        convexity_witness=convex_witness,
        concavity_witness=concave_witness,
    )
