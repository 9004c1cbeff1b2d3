"""Incremental Generative Monte Carlo.

Each chain starts from the observed sample set and, ``depth`` times, fits
the generative approach to its current set, draws one value from the fit
and appends it. The chain's posterior draw is the mean of the grown set.
Running many independent chains gives a Monte Carlo estimate of the
posterior CDF of the expectation.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from igmc.ecdf import EmpiricalCdf
from igmc.errors import EmptySampleSet
from igmc.generative import GenerativeApproach, SampleSet
from igmc.rng import stream

__all__ = [
    "IgmcConfig",
    "ChainState",
    "PosteriorSamples",
    "run_chain",
    "run_igmc",
    "posterior_cdf",
]


@dataclass(frozen=True)
class IgmcConfig:
    sample_size: int = 1000
    depth: int = 1000
    master_seed: int = 0

    def __post_init__(self):
        if self.sample_size < 1:
            raise ValueError("sample_size (number of chains) must be >= 1")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")


class ChainState:
    """Working set of one chain plus its incrementally maintained sum."""

    __slots__ = ("working_set", "running_sum", "steps_taken", "initial_size")

    def __init__(self, initial: SampleSet):
        self.working_set = initial.copy()
        self.initial_size = len(initial)
        self.running_sum = initial.total
        self.steps_taken = 0

    def advance(self, y: float) -> None:
        self.working_set.append(y)
        self.running_sum += y
        self.steps_taken += 1

    @property
    def z(self) -> float:
        """Current running mean over observed and generated values."""
        return self.running_sum / (self.initial_size + self.steps_taken)


@dataclass(frozen=True)
class PosteriorSamples:
    mus: np.ndarray
    config: IgmcConfig
    initial_size: int

    def __len__(self) -> int:
        return self.mus.size


def run_chain(
    initial: SampleSet,
    phi: GenerativeApproach,
    depth: int,
    rng: np.random.Generator,
    trace: list[float] | None = None,
) -> float:
    """Run one chain and return its posterior draw.

    If ``trace`` is given, the running means Z_0, ..., Z_depth are appended
    to it (Z_0 being the mean of the observations).
    """
    if len(initial) == 0:
        raise EmptySampleSet("a chain needs at least one observation")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    state = ChainState(initial)
    if trace is not None:
        trace.append(state.z)
    fit = phi.fit
    for _ in range(depth):
        y = fit(state.working_set).sample(rng)
        state.advance(y)
        if trace is not None:
            trace.append(state.z)
    resummed = math.fsum(state.working_set)
    assert abs(resummed - state.running_sum) <= 1e-9 * max(1.0, abs(resummed)), "running sum drifted"
    return state.z


def run_igmc(
    initial: SampleSet,
    phi: GenerativeApproach,
    config: IgmcConfig,
    threads: int = 1,
) -> PosteriorSamples:
    """Run ``config.sample_size`` chains; chain n draws from stream (seed, n).

    Results are ordered by chain index, so ``threads`` never changes the
    output.
    """
    if len(initial) == 0:
        raise EmptySampleSet("IGMC needs at least one observation")

    def one(n: int) -> float:
        return run_chain(initial, phi, config.depth, stream(config.master_seed, n))

    indices = range(config.sample_size)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            mus = list(pool.map(one, indices))
    else:
        mus = [one(n) for n in indices]
    arr = np.asarray(mus, dtype=float)
    arr.setflags(write=False)
    return PosteriorSamples(arr, config, len(initial))


def posterior_cdf(p: PosteriorSamples) -> EmpiricalCdf:
    """F(t) = #{n : mu_n <= t} / N."""
    return EmpiricalCdf.from_samples(p.mus)
