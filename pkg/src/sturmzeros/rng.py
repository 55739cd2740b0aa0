"""Counter-based SplitMix64 generator.

The i-th raw output (i = 0, 1, ...) is ``mix64(seed + (i + 1) * 0x9E3779B97F4A7C15)``
with all arithmetic mod 2**64, where::

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

Derived draws consume raw outputs in order:

* ``random()``: ``(u >> 11) * 2**-53``
* ``integers(lo, hi)``: ``lo + ((u * (hi - lo)) >> 64)``
* ``normal()``: Box-Muller cosine branch on two uniforms,
  ``sqrt(-2 ln(1 - u1)) * cos(2 pi u2)``

Everything is defined on 64-bit integers and IEEE doubles, so other
implementations reproduce the same streams.
"""

from __future__ import annotations

import math

import numpy as np

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int, counter: int = 0):
        self.seed = int(seed) & MASK
        self.counter = int(counter)

    def next_u64(self) -> int:
        self.counter += 1
        return mix64(self.seed + self.counter * GOLDEN)

    def random(self) -> float:
        return (self.next_u64() >> 11) * 2.0 ** -53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def integers(self, lo: int, hi: int) -> int:
        """Integer in [lo, hi)."""
        if hi <= lo:
            raise ValueError("empty range")
        return lo + ((self.next_u64() * (hi - lo)) >> 64)

    def normal(self) -> float:
        u1 = self.random()
        u2 = self.random()
        return math.sqrt(-2.0 * math.log1p(-u1)) * math.cos(2.0 * math.pi * u2)

    def unit_vector(self, n: int) -> np.ndarray:
        """Uniform direction on the unit sphere in R^n."""
        while True:
            v = np.array([self.normal() for _ in range(n)])
            norm = float(np.sqrt(np.sum(v * v)))
            if norm > 1e-300:
                return v / norm

    def sorted_points(self, k: int, lo: float, hi: float, min_gap: float = 0.0) -> list:
        """k increasing points in [lo, hi] with consecutive gaps >= min_gap."""
        span = hi - lo - (k - 1) * min_gap
        if span < 0:
            raise ValueError("interval too short for the requested gap")
        raw = sorted(self.uniform(0.0, span) for _ in range(k))
        return [lo + r + i * min_gap for i, r in enumerate(raw)]
