"""Closed-form reference CDFs and concentration bounds.

The reference distributions are the Bayesian posteriors (and one
posterior predictive) that IGMC output is compared against. Each exposes
``integral(a, b)`` through its antiderivative so L1 distances against a
step function need no numerical quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from igmc.ecdf import EmpiricalCdf
from igmc.errors import ParameterOutOfRange
from igmc.special import betainc, gammainc

__all__ = [
    "BetaRef",
    "GammaRef",
    "ExponentialRef",
    "UniformRef",
    "LomaxRef",
    "bernoulli_step",
    "beta_cdf",
    "gamma_cdf",
    "quantile",
    "BoundReport",
    "hoeffding_bound",
    "azuma_tail",
    "dkw_tail",
    "igmc_l1_bound",
]


class _ContinuousRef:
    """Shared plumbing: clamp to the support and integrate via antiderivative."""

    lo: float = 0.0
    hi: float = math.inf

    @property
    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    def _cdf(self, t: float) -> float:
        raise NotImplementedError

    def _antiderivative(self, t: float) -> float:
        """Integral of the CDF from ``lo`` to ``t`` for t inside the support."""
        raise NotImplementedError

    def __call__(self, t: float) -> float:
        if t <= self.lo:
            return 0.0
        if t >= self.hi:
            return 1.0
        return self._cdf(t)

    def _anti(self, t: float) -> float:
        if t <= self.lo:
            return 0.0
        if t >= self.hi:
            return self._antiderivative(self.hi) + (t - self.hi)
        return self._antiderivative(t)

    def integral(self, a: float, b: float) -> float:
        if b <= a:
            return 0.0
        return self._anti(b) - self._anti(a)


@dataclass(frozen=True)
class BetaRef(_ContinuousRef):
    alpha: float
    beta: float
    lo: float = field(default=0.0, init=False, repr=False)
    hi: float = field(default=1.0, init=False, repr=False)

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ParameterOutOfRange(f"Beta needs positive parameters, got ({self.alpha}, {self.beta})")

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    def _cdf(self, t):
        return betainc(self.alpha, self.beta, t)

    def _antiderivative(self, t):
        a, b = self.alpha, self.beta
        return t * betainc(a, b, t) - a / (a + b) * betainc(a + 1.0, b, t)


@dataclass(frozen=True)
class GammaRef(_ContinuousRef):
    """Gamma distribution with shape ``shape`` and rate ``rate`` (mean shape/rate)."""

    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0 and self.rate > 0):
            raise ParameterOutOfRange(f"Gamma needs positive parameters, got ({self.shape}, {self.rate})")

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    def _cdf(self, t):
        return gammainc(self.shape, self.rate * t)

    def _antiderivative(self, t):
        k, lam = self.shape, self.rate
        return t * gammainc(k, lam * t) - k / lam * gammainc(k + 1.0, lam * t)


@dataclass(frozen=True)
class ExponentialRef(_ContinuousRef):
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ParameterOutOfRange("exponential rate must be positive")

    def _cdf(self, t):
        return -math.expm1(-self.rate * t)

    def _antiderivative(self, t):
        return t + math.expm1(-self.rate * t) / self.rate


@dataclass(frozen=True)
class UniformRef(_ContinuousRef):
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ParameterOutOfRange("uniform needs hi > lo")

    def _cdf(self, t):
        return (t - self.lo) / (self.hi - self.lo)

    def _antiderivative(self, t):
        return 0.5 * (t - self.lo) ** 2 / (self.hi - self.lo)


@dataclass(frozen=True)
class LomaxRef(_ContinuousRef):
    """Lomax (Pareto II): F(t) = 1 - (1 + t/scale)^-shape."""

    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise ParameterOutOfRange("Lomax needs positive shape and scale")

    def _cdf(self, t):
        return -math.expm1(-self.shape * math.log1p(t / self.scale))

    def _antiderivative(self, t):
        a, s = self.shape, self.scale
        if a == 1.0:
            tail = s * math.log1p(t / s)
        else:
            tail = s / (a - 1.0) * -math.expm1((1.0 - a) * math.log1p(t / s))
        return t - tail


def bernoulli_step(p: float) -> EmpiricalCdf:
    """CDF of Bern(p) as a step function."""
    if not 0.0 <= p <= 1.0:
        raise ParameterOutOfRange(f"Bernoulli p must lie in [0, 1], got {p}")
    return EmpiricalCdf.from_weights([0.0, 1.0], [1.0 - p, p])


def beta_cdf(ref: BetaRef, t: float) -> float:
    return ref(t)


def gamma_cdf(ref: GammaRef, t: float) -> float:
    return ref(t)


def quantile(ref, q: float) -> float:
    """Inverse CDF by bisection; works for any continuous reference."""
    if not 0.0 < q < 1.0:
        raise ParameterOutOfRange("quantile level must lie in (0, 1)")
    lo, hi = ref.support
    if math.isinf(hi):
        hi = max(1.0, 2.0 * lo)
        while ref(hi) < q:
            hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if ref(mid) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class BoundReport:
    kind: str
    inputs: dict
    value: float
    terms: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "inputs": dict(self.inputs), "value": self.value, "terms": dict(self.terms)}


def _positive_int(name: str, v: int) -> None:
    if int(v) != v or v < 1:
        raise ParameterOutOfRange(f"{name} must be a positive integer, got {v!r}")


def hoeffding_bound(m: int, t: float) -> float:
    """Two-sided Hoeffding bound on Pr(|mean - mu| >= t) for m draws in [0, 1]."""
    _positive_int("m", m)
    if not t > 0:
        raise ParameterOutOfRange("t must be positive")
    return min(1.0, 2.0 * math.exp(-2.0 * m * t * t))


def azuma_tail(m: int, h: int, a: float) -> float:
    """Limit of Pr(|Z_K - Z_h| >= a) as K grows, for a chain started from m observations."""
    _positive_int("m", m)
    _positive_int("h", h)
    if not a > 0:
        raise ParameterOutOfRange("a must be positive")
    return min(1.0, 2.0 * math.exp(-0.5 * (h + m) * a * a))


def dkw_tail(n: int, a: float) -> float:
    """Pr(sup|F_n - F| > a) <= 2 exp(-2 n a^2)."""
    _positive_int("n", n)
    if not a > 0:
        raise ParameterOutOfRange("a must be positive")
    return min(1.0, 2.0 * math.exp(-2.0 * n * a * a))


def igmc_l1_bound(m: int, h: int, n: int) -> BoundReport:
    """Bound on the expected L1 distance between the IGMC estimate and its limit.

    The depth term integrates the Azuma tail over a in [0, inf), the
    sample-size term integrates the DKW tail likewise.
    """
    for name, v in (("m", m), ("h", h), ("n", n)):
        _positive_int(name, v)
    depth_term = math.sqrt(2.0 * math.pi / (m + h))
    sample_term = math.sqrt(math.pi / (2.0 * n))
    return BoundReport(
        kind="igmc_l1",
        inputs={"m": m, "h": h, "n": n},
        value=depth_term + sample_term,
        terms={"azuma": depth_term, "dkw": sample_term},
    )
