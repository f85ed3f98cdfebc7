"""Seeded pseudo-random streams built on the splitmix64 generator.

A fixed, named algorithm (rather than a platform generator) so that runs
are reproducible bit-for-bit across machines and across implementations.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """splitmix64 stream with float, range and stream-derivation helpers."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        """Next raw 64-bit output."""
        self._state = s = (self._state + _GOLDEN) & _MASK64
        z = (s ^ (s >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform float in [0, 1) with the full 53-bit mantissa."""
        # next_u64 inlined; this sits in the training hot loops
        self._state = s = (self._state + _GOLDEN) & _MASK64
        z = (s ^ (s >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
        return ((z ^ (z >> 31)) >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        """Uniform float in [lo, hi)."""
        return lo + (hi - lo) * self.random()

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n). Rejection sampling, exactly unbiased."""
        if n <= 0:
            raise ValueError(f"randrange requires n >= 1, got {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def derive(self, index: int) -> "SplitMix64":
        """Independent stream for lane `index`, by golden-ratio seed offsetting.

        Does not advance this stream; derived streams for distinct indices
        (and from distinct parent seeds) do not collide in practice.
        """
        return SplitMix64(_mix((self._state + (index + 1) * _GOLDEN) & _MASK64))
