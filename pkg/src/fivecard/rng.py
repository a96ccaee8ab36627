"""xoshiro256** streams seeded through splitmix64.

The simulator splits its samples over a fixed number of independent lanes
so the numpy fallback can advance every lane at once while the compiled
kernel walks them one by one; both see the same numbers.  Sample ``k`` is
drawn from lane ``k % N_LANES``.
"""
from __future__ import annotations

import numpy as np

ALGORITHM = "xoshiro256**/splitmix64, 1024 lanes"
N_LANES = 1024
MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step; returns (new_state, output)."""
    state = (state + GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return seed


def lane_states(seed: int, n_lanes: int = N_LANES) -> np.ndarray:
    """(n_lanes, 4) uint64 xoshiro states, filled from one splitmix64 sequence."""
    state = check_seed(seed)
    words = []
    for _ in range(4 * n_lanes):
        state, z = splitmix64(state)
        words.append(z)
    return np.array(words, dtype=np.uint64).reshape(n_lanes, 4)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    """Scalar reference generator; also drives the protocol command's random cuts."""

    def __init__(self, seed: int | None = None, state=None):
        if state is None:
            state = [int(w) for w in lane_states(0 if seed is None else seed, 1)[0]]
        self.s = [int(w) & MASK64 for w in state]
        if not any(self.s):
            raise ValueError("xoshiro state must not be all zero")

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return result

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def choice(self, cdf) -> int:
        """Index ``j`` of the first cdf entry strictly above a fresh uniform."""
        u = self.random()
        for j, c in enumerate(cdf):
            if u < c:
                return j
        return len(cdf) - 1


def sampling_cdf(probs) -> np.ndarray:
    """Cumulative sums with the last positive entry (and all after it) pinned above 1.

    Pinning means rounding in the cumulative sum can never select a
    zero-probability index or fall off the end.
    """
    p = np.asarray([float(v) for v in probs], dtype=np.float64)
    cdf = np.cumsum(p)
    last = int(np.flatnonzero(p > 0)[-1])
    cdf[last:] = 2.0
    return cdf
