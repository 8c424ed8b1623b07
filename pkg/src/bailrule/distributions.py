"""Shock distributions on a bounded support [0, theta_bar].

Thin wrappers around scipy frozen distributions so the rest of the package
can stay agnostic about the family.  Each exposes pdf/cdf/ppf/rvs plus the
support bound; ``hazard`` is a free function because it is family-agnostic.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from .errors import ParameterError

__all__ = [
    "ShockDistribution",
    "UniformShock",
    "TruncatedExponentialShock",
    "BetaShock",
    "hazard",
]


class ShockDistribution:
    """Base: a continuous shock with support [0, theta_bar]."""

    theta_bar: float

    def __init__(self, theta_bar: float, frozen) -> None:
        theta_bar = float(theta_bar)
        if not theta_bar > 0 or not math.isfinite(theta_bar):
            raise ParameterError(f"theta_bar must be finite and > 0, got {theta_bar}")
        self.theta_bar = theta_bar
        self._frozen = frozen

    def pdf(self, theta):
        return self._frozen.pdf(theta)

    def cdf(self, theta):
        return self._frozen.cdf(theta)

    def ppf(self, q):
        return self._frozen.ppf(q)

    # quantile == generalized inverse of the cdf; alias kept for callers that
    # speak distribution-theory rather than scipy.
    quantile = ppf

    def rvs(self, size: int, rng: np.random.Generator):
        return self._frozen.rvs(size=size, random_state=rng)

    def mean(self) -> float:
        return float(self._frozen.mean())


class UniformShock(ShockDistribution):
    """Uniform on [0, theta_bar]."""

    def __init__(self, theta_bar: float) -> None:
        super().__init__(theta_bar, stats.uniform(loc=0.0, scale=float(theta_bar)))


class TruncatedExponentialShock(ShockDistribution):
    """Exponential with the given rate, truncated to [0, theta_bar]."""

    def __init__(self, rate: float, theta_bar: float) -> None:
        rate = float(rate)
        if not rate > 0:
            raise ParameterError(f"rate must be > 0, got {rate}")
        self.rate = rate
        super().__init__(
            theta_bar, stats.truncexpon(b=rate * float(theta_bar), scale=1.0 / rate)
        )


class BetaShock(ShockDistribution):
    """Beta(a, b) rescaled to [0, theta_bar]."""

    def __init__(self, a: float, b: float, theta_bar: float) -> None:
        a, b = float(a), float(b)
        if not (a > 0 and b > 0):
            raise ParameterError(f"beta shape parameters must be > 0, got a={a}, b={b}")
        self.a, self.b = a, b
        super().__init__(theta_bar, stats.beta(a, b, loc=0.0, scale=float(theta_bar)))


def hazard(theta, dist: ShockDistribution):
    """Hazard rate f(theta) / (1 - F(theta)) of the shock, elementwise.

    Undefined once the survivor function hits zero (at and beyond the upper
    support bound); that is a caller error, not an infinity to propagate.
    """
    theta = np.asarray(theta, dtype=float)
    denom = 1.0 - dist.cdf(theta)
    if np.any(denom <= 0.0):
        raise ParameterError("hazard undefined where the survivor function is 0")
    out = dist.pdf(theta) / denom
    if theta.ndim == 0:
        return float(out)
    return out
