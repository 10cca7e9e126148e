"""
Special Functions

Principal branch of the Lambert W function and its derivative, plus the
Wright omega function. W0 is computed with Halley's method; the iteration is
seeded from the branch-point series near -1/e, a rational fit on the
moderate range and the asymptotic expansion for large arguments.
"""

import logging
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special

from src.services.errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

BRANCH_POINT = -1.0 / math.e
# Arguments this far below -1/e are treated as rounding of the branch point.
BRANCH_SLACK = 1e-12
MAX_HALLEY_ITERATIONS = 50
RESIDUAL_ROUNDING = 4.0 * np.finfo(np.float64).eps
# Smallest residual tolerance that rounding of w e^w can meet.
RESIDUAL_FLOOR = 16.0 * np.finfo(np.float64).eps


def _initial_guess(u: NDArray[np.float64]) -> NDArray[np.float64]:
    w = np.empty_like(u)

    near_branch = u < -0.25
    q = np.sqrt(np.maximum(2.0 * (math.e * u[near_branch] + 1.0), 0.0))
    w[near_branch] = -1.0 + q - q * q / 3.0 + 11.0 / 72.0 * q**3

    moderate = (u >= -0.25) & (u < 3.0)
    lp = np.log1p(u[moderate])
    w[moderate] = lp * (1.0 - np.log1p(lp) / (2.0 + lp))

    large = u >= 3.0
    l1 = np.log(u[large])
    l2 = np.log(l1)
    w[large] = l1 - l2 + l2 / l1
    return w


def lambert_w0(u: ArrayLike, tol: float = 1e-14) -> float | NDArray[np.float64]:
    """
    Principal branch W0 of the Lambert W function.

    Solves w e^w = u with w >= -1. The result satisfies
    |w e^w - u| <= tol * max(1, |u|); the iteration stops once that bound holds
    and the Halley step is below tol relative to 1 + |w|. A tol below the
    rounding floor of w e^w is raised to the floor.

    Args:
        u: Argument(s), u >= -1/e
        tol: Residual tolerance, relative to max(1, |u|)

    Returns:
        W0(u) as a float for scalar input, an array otherwise

    Raises:
        DomainError: If u < -1/e or u is NaN
        ConvergenceError: If Halley's method does not converge
    """
    arr = np.asarray(u, dtype=np.float64)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).ravel()

    if np.any(np.isnan(flat)):
        raise DomainError("lambert_w0 is undefined for NaN")
    if np.any(flat < BRANCH_POINT - BRANCH_SLACK):
        raise DomainError(f"lambert_w0 requires u >= -1/e, got min {flat.min()!r}")

    w = np.zeros_like(flat)
    at_branch = flat <= BRANCH_POINT
    w[at_branch] = -1.0
    infinite = np.isposinf(flat)
    w[infinite] = np.inf
    active = ~(at_branch | infinite | (flat == 0.0))

    if np.any(active):
        target = flat[active]
        guess = _initial_guess(target)
        todo = np.ones(target.shape, dtype=bool)
        residual_tol = max(tol, RESIDUAL_FLOOR)
        for _ in range(MAX_HALLEY_ITERATIONS):
            wk = guess[todo]
            ew = np.exp(wk)
            residual = wk * ew - target[todo]
            wp1 = wk + 1.0
            # Guard the vanishing derivative at w = -1.
            wp1 = np.where(np.abs(wp1) < 1e-300, 1e-300, wp1)
            denom = ew * wp1 - (wk + 2.0) * residual / (2.0 * wp1)
            step = np.where(denom != 0.0, residual / denom, 0.0)
            guess[todo] = np.maximum(wk - step, -1.0)
            # Near the branch point W is ill-conditioned; a rounding-level residual is final.
            settled = (np.abs(step) <= tol * (1.0 + np.abs(guess[todo]))) | (
                np.abs(residual) <= RESIDUAL_ROUNDING * np.abs(target[todo])
            )
            bounded = np.abs(residual) <= residual_tol * np.maximum(1.0, np.abs(target[todo]))
            done = settled & bounded
            idx = np.flatnonzero(todo)
            todo[idx[done]] = False
            if not np.any(todo):
                break
        else:
            worst = float(target[todo][0])
            raise ConvergenceError(
                f"lambert_w0 did not converge in {MAX_HALLEY_ITERATIONS} iterations at u={worst!r}"
            )
        w[active] = guess

    result = w.reshape(np.atleast_1d(arr).shape)
    if scalar:
        return float(result[0])
    return result


def lambert_w0_prime(u: ArrayLike) -> float | NDArray[np.float64]:
    """
    Derivative of W0, 1 / (e^W (1 + W)), equal to W / (u (1 + W)) for u != 0.

    Raises:
        DomainError: If u <= -1/e, where the derivative is unbounded
    """
    arr = np.asarray(u, dtype=np.float64)
    if np.any(arr <= BRANCH_POINT):
        raise DomainError("lambert_w0_prime requires u > -1/e")
    w = np.asarray(lambert_w0(arr))
    result = 1.0 / (np.exp(w) * (1.0 + w))
    if result.ndim == 0:
        return float(result)
    return result


def wright_omega(z: ArrayLike) -> float | NDArray[np.float64]:
    """
    Wright omega function, the solution w of w + ln(w) = z.

    Equal to W0(e^z) without overflow for large z.
    """
    result = np.real(special.wrightomega(np.asarray(z, dtype=np.float64)))
    if np.ndim(result) == 0:
        return float(result)
    return np.asarray(result, dtype=np.float64)
