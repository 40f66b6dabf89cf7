"""Portable counter-based pseudo-random generator (splitmix64).

The u64 stream is a pure function of (seed, counter), so fixtures regenerate
bit-identically from a seed alone and blocks can be produced out of order by
independent generators. Gaussian variates go through libm (log/cos/sin) and
are therefore exact only up to the platform's libm rounding.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_TWO_POW_MINUS_53 = 2.0 ** -53
_TWO_PI = 2.0 * np.pi


def _mix(state: np.ndarray) -> np.ndarray:
    # finalizer of splitmix64; wraps mod 2^64 via uint64 arithmetic
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Deterministic stream of u64 / uniform / normal variates.

    The k-th raw word (0-based) is mix(seed + (k+1)*golden mod 2^64), which
    equals the classic sequential splitmix64 started at `seed`.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        self.counter = 0

    def u64_block(self, n: int) -> np.ndarray:
        """Next n raw words as a uint64 array; advances the counter by n."""
        if n < 0:
            raise ValueError("block size must be nonnegative")
        ks = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        states = np.uint64(self.seed) + ks * np.uint64(_GOLDEN)
        return _mix(states)

    def next_u64(self) -> int:
        return int(self.u64_block(1)[0])

    def uniforms(self, n: int) -> np.ndarray:
        """n doubles in [0, 1), each from the top 53 bits of one word."""
        block = self.u64_block(n)
        return (block >> np.uint64(11)).astype(np.float64) * _TWO_POW_MINUS_53

    def uniform(self) -> float:
        return float(self.uniforms(1)[0])

    def normals(self, n: int) -> np.ndarray:
        """n standard normals via Box-Muller on ceil(n/2) uniform pairs."""
        if n < 0:
            raise ValueError("sample size must be nonnegative")
        m = (n + 1) // 2
        if m == 0:
            return np.empty(0, dtype=np.float64)
        u1 = 1.0 - self.uniforms(m)  # (0, 1]: log stays finite
        u2 = self.uniforms(m)
        r = np.sqrt(-2.0 * np.log(u1))
        out = np.empty(2 * m, dtype=np.float64)
        out[0::2] = r * np.cos(_TWO_PI * u2)
        out[1::2] = r * np.sin(_TWO_PI * u2)
        return out[:n]

    def normal(self) -> float:
        return float(self.normals(1)[0])
