"""Deterministic per-chain random streams.

Every chain gets its own generator whose seed is a pure function of the
master seed and the chain index::

    stream_seed(master, index) = splitmix64(splitmix64(master) XOR index)

The 64-bit result seeds a PCG64 generator through numpy's SeedSequence, so
any implementation with the same hash and bit generator reproduces the
streams. Chain outputs therefore never depend on execution order.
"""

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF


def splitmix64(x: int) -> int:
    """One round of the SplitMix64 finalizer (Steele, Lea & Flood)."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_seed(master_seed: int, index: int) -> int:
    if master_seed < 0 or index < 0:
        raise ValueError("seeds and stream indices must be non-negative")
    return splitmix64(splitmix64(master_seed & MASK64) ^ (index & MASK64))


def stream(master_seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(stream_seed(master_seed, index)))
