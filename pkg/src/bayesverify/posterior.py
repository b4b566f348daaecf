"""Beta-Bernoulli conjugate beliefs.

A :class:`BetaPosterior` is used in two roles: as the belief over the
domain parameter (e.g. an action failure probability learned from
observations) and as the belief over the satisfaction probability that
the verification loop refines one simulation at a time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "BetaPosterior",
    "ObservationSummary",
    "UNIFORM",
    "update",
    "mass_above",
    "regularized_incomplete_beta",
    "sample",
    "sample_many",
    "binomial_upper",
]

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_EPS = 3e-16
_TINY = 1e-300


@dataclass(frozen=True)
class BetaPosterior:
    """Beta(a, b) belief over a Bernoulli parameter."""

    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0) or math.isinf(self.a) or math.isinf(self.b):
            raise ValueError(f"Beta shapes must be positive and finite, got a={self.a}, b={self.b}")

    @classmethod
    def from_counts(cls, successes: int, failures: int, prior: "BetaPosterior | None" = None) -> "BetaPosterior":
        prior = UNIFORM if prior is None else prior
        if successes < 0 or failures < 0:
            raise ValueError("counts must be nonnegative")
        return cls(prior.a + successes, prior.b + failures)

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)

    @property
    def variance(self) -> float:
        s = self.a + self.b
        return self.a * self.b / (s * s * (s + 1.0))

    def update(self, outcome: bool) -> "BetaPosterior":
        return update(self, outcome)

    def update_many(self, outcomes: Iterable[bool]) -> "BetaPosterior":
        s = f = 0
        for o in outcomes:
            if o:
                s += 1
            else:
                f += 1
        return BetaPosterior(self.a + s, self.b + f)

    def cdf(self, x: float) -> float:
        return regularized_incomplete_beta(self.a, self.b, x)

    def mass_above(self, threshold: float) -> float:
        return mass_above(self, threshold)

    def sample(self, rng: np.random.Generator) -> float:
        return sample(self, rng)


UNIFORM = BetaPosterior(1.0, 1.0)


@dataclass(frozen=True)
class ObservationSummary:
    """Sufficient statistics of Bernoulli observations: ``failures`` out of ``count``.

    "Failure" is the event whose probability is being learned, so the
    belief built from it is Beta(failures + 1, count - failures + 1).
    """

    failures: int
    count: int

    def __post_init__(self):
        if self.count < 0 or not 0 <= self.failures <= self.count:
            raise ValueError(f"need 0 <= failures <= count, got {self.failures}/{self.count}")

    @classmethod
    def from_sequence(cls, outcomes: Iterable[bool]) -> "ObservationSummary":
        outcomes = list(outcomes)
        return cls(sum(bool(o) for o in outcomes), len(outcomes))

    def posterior(self, prior: BetaPosterior | None = None) -> BetaPosterior:
        return BetaPosterior.from_counts(self.failures, self.count - self.failures, prior)

    @property
    def mle(self) -> float:
        if self.count == 0:
            raise ValueError("maximum-likelihood estimate undefined for zero observations")
        return self.failures / self.count


def update(post: BetaPosterior, outcome: bool) -> BetaPosterior:
    """Conjugate update with a single Bernoulli outcome."""
    if outcome:
        return BetaPosterior(post.a + 1.0, post.b)
    return BetaPosterior(post.a, post.b + 1.0)


def mass_above(post: BetaPosterior, threshold: float) -> float:
    """Posterior probability that the parameter exceeds ``threshold``."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    return _ibeta_pair(post.a, post.b, threshold)[1]


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), the Beta(a, b) CDF at ``x``.

    Continued fraction (modified Lentz) on whichever side of
    ``(a + 1) / (a + b + 2)`` converges fast, with the power-term prefactor
    evaluated through Stirling remainders so that large shapes do not lose
    digits to cancellation between log-gamma values.
    """
    return _ibeta_pair(a, b, x)[0]


def _ibeta_pair(a: float, b: float, x: float) -> tuple[float, float]:
    # returns (I_x(a,b), 1 - I_x(a,b)), each computed without subtraction loss
    if not (a > 0 and b > 0) or math.isinf(a) or math.isinf(b):
        raise ValueError(f"shapes must be positive and finite, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0, 1.0
    if x == 1.0:
        return 1.0, 0.0
    y = 1.0 - x
    if x < (a + 1.0) / (a + b + 2.0):
        w = math.exp(_log_power_terms(a, b, x, y)) * _betacf(a, b, x) / a
        w = min(w, 1.0)
        return w, 1.0 - w
    w = math.exp(_log_power_terms(b, a, y, x)) * _betacf(b, a, y) / b
    w = min(w, 1.0)
    return 1.0 - w, w


def _stirling_remainder(z: float) -> float:
    """lgamma(z) minus its Stirling approximation (z - 1/2) ln z - z + ln(2 pi)/2."""
    if z >= 10.0:
        r = 1.0 / (z * z)
        return (1.0 / 12.0 - r * (1.0 / 360.0 - r * (1.0 / 1260.0 - r * (1.0 / 1680.0 - r / 1188.0)))) / z
    return math.lgamma(z) - ((z - 0.5) * math.log(z) - z + _HALF_LOG_2PI)


def _deviance_term(a: float, x: float, p0: float) -> float:
    # a * (log(x / p0) - (x - p0) / p0)
    u = (x - p0) / p0
    if abs(u) < 0.5:
        return a * (math.log1p(u) - u)
    return a * (math.log(x / p0) - u)


def _log_power_terms(a: float, b: float, x: float, y: float) -> float:
    """log of x^a y^b / B(a, b), with y = 1 - x supplied by the caller."""
    s = a + b
    p0 = a / s
    q0 = b / s
    # linear terms of a*log(x/p0) + b*log(y/q0) cancel exactly
    dev = _deviance_term(a, x, p0) + _deviance_term(b, y, q0)
    log_front = 0.5 * (math.log(a) + math.log(b) - math.log(s)) - _HALF_LOG_2PI
    corr = _stirling_remainder(s) - _stirling_remainder(a) - _stirling_remainder(b)
    return dev + log_front + corr


def _betacf(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    max_terms = 1000 + int(20 * math.sqrt(max(a, b)))
    for m in range(1, max_terms + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def sample(post: BetaPosterior, rng: np.random.Generator) -> float:
    """Draw one value from Beta(a, b) as a ratio of two Gamma variates."""
    g1 = rng.standard_gamma(post.a)
    g2 = rng.standard_gamma(post.b)
    total = g1 + g2
    if total == 0.0:
        # both gammas underflowed (tiny shapes); the draw sits at an endpoint
        return 1.0 if rng.random() < post.mean else 0.0
    return float(g1 / total)


def sample_many(post: BetaPosterior, size: int, rng: np.random.Generator) -> np.ndarray:
    g1 = rng.standard_gamma(post.a, size=size)
    g2 = rng.standard_gamma(post.b, size=size)
    total = g1 + g2
    out = np.empty(size)
    ok = total > 0.0
    out[ok] = g1[ok] / total[ok]
    n_bad = int(size - np.count_nonzero(ok))
    if n_bad:
        out[~ok] = (rng.random(n_bad) < post.mean).astype(float)
    return out


def binomial_upper(n: int, p: float, level: float = 0.99) -> int:
    """Smallest k with P(X <= k) >= level for X ~ Binomial(n, p)."""
    if n < 0 or not 0.0 <= p <= 1.0 or not 0.0 < level < 1.0:
        raise ValueError("need n >= 0, p in [0, 1], level in (0, 1)")
    if p == 0.0 or n == 0:
        return 0
    if p == 1.0:
        return n
    for k in range(n):
        # P(X <= k) = I_{1-p}(n - k, k + 1)
        if regularized_incomplete_beta(n - k, k + 1, 1.0 - p) >= level:
            return k
    return n
