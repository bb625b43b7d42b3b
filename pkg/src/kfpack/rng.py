"""SplitMix64 draws for everything that must be reproducible bit-for-bit.

numpy's own generators are stable too, but their float pipelines leave room
for platform drift; raw integer mixing does not.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def splitmix64(seed: int, count: int) -> np.ndarray:
    """Return `count` u64 draws of the SplitMix64 stream started at `seed`.

    Draw i mixes the state seed + (i+1)*gamma, so the whole stream is
    computed vectorized without carrying state. Wrapping is mod 2^64.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    idx = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed & _MASK64) + idx * np.uint64(_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def uniform_small(seed: int, count: int, scale: float = 0.02) -> np.ndarray:
    """f32 values in [-scale, scale) from the top 24 bits of each draw."""
    top = splitmix64(seed, count) >> np.uint64(40)
    vals = (top.astype(np.float64) / float(1 << 24)) * (2.0 * scale) - scale
    return vals.astype(np.float32)
