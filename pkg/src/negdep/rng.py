"""Deterministic, splittable random stream.

Counter-based SplitMix64: output i is a pure function of (key, i), so the
stream is reproducible across runs and platforms and substreams can be
derived without sharing state.  The exact output sequence is part of this
package's contract and is pinned by tests; do not change the mixing
constants or the draw algorithms.

Reference for the mixer: Steele, Lea, Flood, "Fast splittable pseudorandom
number generators", OOPSLA 2014.
"""

import numpy as np

__all__ = ["RngStream", "FRAC_BITS"]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15  # increment between successive counter states
_SPLIT = 0xD1B54A32D192ED03   # increment used when deriving substream keys

# Uniform offsets are 53-bit fractions; 53 = float64 mantissa width.
FRAC_BITS = 53


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= np.uint64(0xBF58476D1CE4E5B9)
    z ^= z >> np.uint64(27)
    z *= np.uint64(0x94D049BB133111EB)
    z ^= z >> np.uint64(31)
    return z


class RngStream:
    """Splittable deterministic stream of 64-bit words.

    Equal seeds give equal sequences.  ``split(k)`` derives an independent
    substream keyed by (seed, k); children never share counter state with
    the parent, so parallel consumers each own their stream.
    """

    __slots__ = ("_key", "_counter")

    def __init__(self, seed: int):
        self._key = seed & _MASK64
        self._counter = 0

    @property
    def seed(self) -> int:
        """The key; feeding it back to RngStream reproduces this stream."""
        return self._key

    @property
    def counter(self) -> int:
        return self._counter

    def split(self, stream_id: int) -> "RngStream":
        child = RngStream.__new__(RngStream)
        child._key = _mix64(self._key + ((stream_id + 1) & _MASK64) * _SPLIT)
        child._counter = 0
        return child

    # -- raw words ---------------------------------------------------------

    def u64(self) -> int:
        self._counter += 1
        return _mix64(self._key + self._counter * _GOLDEN)

    def u64_array(self, count: int) -> np.ndarray:
        idx = np.arange(self._counter + 1, self._counter + count + 1, dtype=np.uint64)
        self._counter += count
        states = np.uint64(self._key) + idx * np.uint64(_GOLDEN)
        return _mix64_array(states)

    # -- derived draws -----------------------------------------------------

    def bits53(self) -> int:
        return self.u64() >> 11

    def bits53_array(self, count: int) -> np.ndarray:
        return self.u64_array(count) >> np.uint64(64 - FRAC_BITS)

    def uniform01(self, count: int) -> np.ndarray:
        """count iid uniforms on [0,1) as floats (53-bit resolution)."""
        return self.bits53_array(count).astype(np.float64) * (2.0 ** -FRAC_BITS)

    def integer(self, bound: int) -> int:
        """Unbiased uniform integer in [0, bound) via top-bits rejection."""
        if bound < 1:
            raise ValueError("bound must be positive")
        if bound == 1:
            return 0
        k = (bound - 1).bit_length()
        while True:
            r = self.u64() >> (64 - k)
            if r < bound:
                return r

    def integers(self, bound: int, count: int) -> list:
        return [self.integer(bound) for _ in range(count)]

    def permutation(self, n: int) -> list:
        """Uniform permutation of range(n) by Fisher-Yates (downward)."""
        a = list(range(n))
        for j in range(n - 1, 0, -1):
            k = self.integer(j + 1)
            a[j], a[k] = a[k], a[j]
        return a
