"""Rate functions for monotone subsequences and Eulerian statistics.

Rates are returned as floats, with ``math.inf`` outside the effective domain.
:func:`to_json_value` turns infinities into the string ``"inf"`` for output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from conjperm.errors import ConvergenceFailure, DomainError
from conjperm.samplers import bernoulli_probs

INF = math.inf
GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class RatePoint:
    x: float
    value: float
    speed: float | None
    scale: float | None

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "value": to_json_value(self.value),
            "speed": self.speed,
            "scale": self.scale,
        }


def to_json_value(v: float):
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    return v


def i_lis_half(x: float) -> float:
    """Upper-tail rate at speed sqrt(n): 2x arccosh(x/2) on [2, inf), +inf below."""
    if x < 2:
        return INF
    return 2 * x * math.acosh(x / 2)


def i_lis_one(x: float) -> float:
    """Lower-tail rate at speed n; 0 above 2, +inf at x <= 0."""
    if x <= 0:
        return INF
    if x >= 2:
        return 0.0
    x2 = x * x
    # log1p forms keep precision as x -> 2, where the rate vanishes cubically
    log_half = math.log1p((x - 2) / 2)
    log_ratio = math.log1p((x2 - 4) / (4 + x2))
    val = -1 + x2 / 4 + 2 * log_half - (2 + x2 / 2) * log_ratio
    if not math.isfinite(val):
        return INF
    return max(val, 0.0)


def moderate_rate(x: float) -> float:
    """(4/3) x^{3/2}, the rate of LIS >= 2 sqrt(n) + x n^nu."""
    if x <= 0:
        raise DomainError("moderate rate needs x > 0")
    return 4.0 / 3.0 * x ** 1.5


def uniform_cgf(t: float) -> float:
    """ln((e^t - 1)/t), the log-MGF of Uniform(0, 1); 0 at t = 0."""
    if t == 0:
        return 0.0
    if t > 0:
        return t + math.log(-math.expm1(-t)) - math.log(t)
    return math.log(-math.expm1(t)) - math.log(-t)


def legendre_sup(
    cgf: Callable[[float], float],
    x: float,
    bracket: tuple[float, float] = (-1.0, 1.0),
    tol: float = 1e-10,
    max_expand: int = 60,
    max_iter: int = 500,
) -> float:
    """sup_t (x t - cgf(t)) for a convex cgf, by golden-section search.

    The bracket is widened geometrically until the concave objective peaks
    strictly inside it.
    """

    def g(t: float) -> float:
        try:
            v = cgf(t)
        except (OverflowError, ValueError):
            return -INF
        if not math.isfinite(v):
            return -INF
        return x * t - v

    lo, hi = bracket
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    width = hi - lo
    for _ in range(max_expand):
        step = width / 4
        if g(hi) > g(hi - step):
            hi += width
        elif g(lo) > g(lo + step):
            lo -= width
        else:
            break
        width *= 2
    else:
        raise ConvergenceFailure(f"maximizer not bracketed for x={x}")

    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(c)):
            break
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - GOLDEN * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + GOLDEN * (b - a)
            gd = g(d)
    else:
        raise ConvergenceFailure(f"golden section did not converge for x={x}")
    t_star = (a + b) / 2
    return max(g(t_star), gc, gd)


def i_euler(x: float) -> float:
    """Rate of descents (and any Eulerian statistic) at speed n."""
    if x <= 0 or x >= 1:
        return INF
    if x == 0.5:
        return 0.0
    return max(legendre_sup(uniform_cgf, x), 0.0)


def bennett_log_bound(v: float, t: float) -> float:
    """Upper bound -(v+t) ln(1 + t/v) + t on ln P(sum X - sum E X > t)."""
    if v <= 0 or t <= 0:
        raise DomainError("Bennett bound needs v > 0 and t > 0")
    return -(v + t) * math.log1p(t / v) + t


def ci_bound_ewens(theta: float, n: int, alpha: float, eps: float) -> float:
    """Bennett bound on ln P(#cycles > eps n^alpha) for Ewens(theta, n).

    The cycle count is a sum of independent Bernoulli(theta/(i+theta-1));
    their second moments sum to v and t = eps n^alpha - v.
    """
    threshold = eps * n ** alpha
    if theta == 0:
        # exactly one cycle
        return -INF if threshold >= 1 else 0.0
    v = float(np.sum(bernoulli_probs(theta, n)))
    t = threshold - v
    if t <= 0:
        raise DomainError(f"bound vacuous: eps n^alpha = {threshold:g} <= v = {v:g}")
    return bennett_log_bound(v, t)


# (speed exponent, scale exponent) for each named rate
RATE_EXPONENTS = {
    "lis-half": (0.5, 0.5),
    "lis-one": (1.0, 0.5),
    "euler": (1.0, 1.0),
}


def moderate_exponents(nu: float) -> tuple[float, float]:
    if not 1 / 6 < nu < 1 / 2:
        raise DomainError("nu must lie in (1/6, 1/2)")
    return 1.5 * nu - 0.25, nu


RATE_FUNCTIONS: dict[str, Callable[[float], float]] = {
    "lis-half": i_lis_half,
    "lis-one": i_lis_one,
    "moderate": moderate_rate,
    "euler": i_euler,
}


def rate_point(name: str, x: float, nu: float = 1 / 3) -> RatePoint:
    if name == "moderate":
        speed, scale = moderate_exponents(nu)
    else:
        speed, scale = RATE_EXPONENTS[name]
    return RatePoint(x, RATE_FUNCTIONS[name](x), speed, scale)
