"""Deterministic portable PRNG: xoshiro256** seeded through splitmix64.

Every random draw in the package flows through this generator, so a seed
pins the entire simulation bitwise on any platform (the algorithm uses only
64-bit integer arithmetic). The 4-word state lives in a uint64 numpy array
that is shared with the numba relaxation kernels: kernel-side draws advance
the same stream as the Python-level methods.

Draw primitives and their exact consumption:
  - next_u64():   one xoshiro step.
  - random():     one step; top 53 bits scaled to [0, 1).
  - randbelow(n): masked rejection sampling; >= 1 step, unbiased.
"""

import numpy as np
from numba import njit

_U64 = np.uint64
_MASK64 = (1 << 64) - 1


@njit(cache=True)
def _splitmix64_next(state):
    """Advance a 1-element uint64 splitmix64 state and return the output."""
    state[0] += _U64(0x9E3779B97F4A7C15)
    z = state[0]
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


@njit(cache=True)
def _rotl(x, k):
    return (x << k) | (x >> (_U64(64) - k))


@njit(cache=True)
def xo_next(s):
    """One xoshiro256** step on the 4-element uint64 state array `s`."""
    s0, s1, s2, s3 = s[0], s[1], s[2], s[3]
    result = _rotl(s1 * _U64(5), _U64(7)) * _U64(9)
    t = s1 << _U64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, _U64(45))
    s[0], s[1], s[2], s[3] = s0, s1, s2, s3
    return result


@njit(cache=True)
def xo_random(s):
    """Uniform double in [0, 1) from the top 53 bits of one step."""
    return (xo_next(s) >> _U64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def xo_randbelow(s, n):
    """Unbiased uniform uint64 in [0, n) via power-of-two masked rejection."""
    m = n - _U64(1)
    mask = m
    mask |= mask >> _U64(1)
    mask |= mask >> _U64(2)
    mask |= mask >> _U64(4)
    mask |= mask >> _U64(8)
    mask |= mask >> _U64(16)
    mask |= mask >> _U64(32)
    while True:
        r = xo_next(s) & mask
        if r <= m:
            return r


class Rng:
    """Seeded deterministic generator; state is transferable and snapshotable."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        sm = np.array([self.seed], dtype=np.uint64)
        s = np.empty(4, dtype=np.uint64)
        for i in range(4):
            s[i] = _splitmix64_next(sm)
        if not s.any():
            s[0] = _U64(0x9E3779B97F4A7C15)
        self._s = s

    @property
    def state_array(self) -> np.ndarray:
        """The live uint64[4] state, shared with numba kernels."""
        return self._s

    def next_u64(self) -> int:
        return int(xo_next(self._s))

    def random(self) -> float:
        return float(xo_random(self._s))

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError(f"randbelow needs n >= 1, got {n}")
        return int(xo_randbelow(self._s, _U64(n)))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def getstate(self) -> tuple:
        return tuple(int(x) for x in self._s)

    def setstate(self, state) -> None:
        self._s[:] = np.asarray(state, dtype=np.uint64)
