"""Sample sets, generative models and the built-in generative approaches.

A *generative approach* maps a finite sample set to a fitted distribution
that can be sampled. Anything with a ``name`` attribute and a
``fit(SampleSet) -> GenerativeModel`` method is accepted by the engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Protocol, runtime_checkable

import numpy as np

from igmc.errors import (
    EmptySampleSet,
    NonBinaryValue,
    SupportViolation,
    ZeroMean,
)

__all__ = [
    "Support",
    "SampleSet",
    "GenerativeModel",
    "GenerativeApproach",
    "BernoulliModel",
    "ExponentialModel",
    "Approach",
    "fit_bernoulli",
    "fit_exponential",
    "sample_model",
    "BERNOULLI",
    "EXPONENTIAL",
]


class Support(str, Enum):
    UNIT_INTERVAL = "unit_interval"
    NONNEG_REALS = "nonneg_reals"
    BINARY = "binary"

    def contains(self, x: float) -> bool:
        if self is Support.BINARY:
            return x == 0.0 or x == 1.0
        if self is Support.UNIT_INTERVAL:
            return 0.0 <= x <= 1.0
        return 0.0 <= x < math.inf

    @property
    def bounds(self) -> tuple[float, float]:
        if self is Support.NONNEG_REALS:
            return (0.0, math.inf)
        return (0.0, 1.0)


class SampleSet:
    """Ordered observations with a declared support.

    The running total is kept incrementally so ``mean()`` is O(1); this is
    what lets a chain refit after every appended value without quadratic
    cost. The value list is private: go through :meth:`append` so the
    support check and the total stay in sync.
    """

    __slots__ = ("_values", "_total", "support")

    def __init__(self, values: Iterable[float] = (), support: Support | str = Support.UNIT_INTERVAL):
        self.support = Support(support)
        self._values: list[float] = []
        self._total = 0.0
        for v in values:
            self.append(v)

    def append(self, value: float) -> None:
        value = float(value)
        if not self.support.contains(value):
            raise SupportViolation(f"{value!r} is outside support {self.support.value}")
        self._values.append(value)
        self._total += value

    def copy(self) -> SampleSet:
        new = SampleSet.__new__(SampleSet)
        new.support = self.support
        new._values = list(self._values)
        new._total = self._total
        return new

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(self._values)

    @property
    def total(self) -> float:
        return self._total

    def mean(self) -> float:
        if not self._values:
            raise EmptySampleSet("mean of an empty sample set")
        return self._total / len(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __iter__(self):
        return iter(self._values)

    def __repr__(self) -> str:
        return f"SampleSet(n={len(self)}, mean={self._total / max(len(self), 1):.6g}, support={self.support.value})"


@runtime_checkable
class GenerativeModel(Protocol):
    support: Support

    def sample(self, rng: np.random.Generator) -> float: ...

    def mean(self) -> float: ...


@runtime_checkable
class GenerativeApproach(Protocol):
    name: str

    def fit(self, s: SampleSet) -> GenerativeModel: ...


class BernoulliModel:
    __slots__ = ("p",)
    support = Support.BINARY

    def __init__(self, p: float):
        self.p = p

    def sample(self, rng: np.random.Generator) -> float:
        return 1.0 if rng.random() < self.p else 0.0

    def mean(self) -> float:
        return self.p

    def __eq__(self, other):
        return isinstance(other, BernoulliModel) and other.p == self.p

    def __repr__(self) -> str:
        return f"BernoulliModel(p={self.p!r})"


class ExponentialModel:
    """Exponential distribution parameterised by its mean.

    Storing the mean rather than the rate keeps ``mean()`` bit-identical to
    the sample mean it was fitted from.
    """

    __slots__ = ("scale",)
    support = Support.NONNEG_REALS

    def __init__(self, scale: float):
        self.scale = scale

    @property
    def rate(self) -> float:
        return 1.0 / self.scale

    def sample(self, rng: np.random.Generator) -> float:
        # u in (0, 1] so the log is finite
        u = 1.0 - rng.random()
        return -math.log(u) * self.scale

    def mean(self) -> float:
        return self.scale

    def __eq__(self, other):
        return isinstance(other, ExponentialModel) and other.scale == self.scale

    def __repr__(self) -> str:
        return f"ExponentialModel(rate={self.rate!r})"


def fit_bernoulli(s: SampleSet) -> BernoulliModel:
    """Fit Bern(a/M), a being the number of ones among all M values."""
    m = len(s)
    if m == 0:
        raise EmptySampleSet("cannot fit a Bernoulli model to no data")
    if s.support is not Support.BINARY:
        for v in s:
            if v != 0.0 and v != 1.0:
                raise NonBinaryValue(f"value {v!r} is not in {{0, 1}}")
    # total is an exact integer for binary data
    return BernoulliModel(s.total / m)


def fit_exponential(s: SampleSet) -> ExponentialModel:
    m = len(s)
    if m == 0:
        raise EmptySampleSet("cannot fit an exponential model to no data")
    mu = s.total / m
    if mu <= 0.0:
        raise ZeroMean("sample mean is zero; exponential rate undefined")
    return ExponentialModel(mu)


def sample_model(model: GenerativeModel, rng: np.random.Generator) -> float:
    return model.sample(rng)


@dataclass(frozen=True)
class Approach:
    """Wrap a plain fitting function as a named generative approach."""

    name: str
    fit: Callable[[SampleSet], GenerativeModel]


BERNOULLI = Approach("bernoulli", fit_bernoulli)
EXPONENTIAL = Approach("exponential", fit_exponential)
