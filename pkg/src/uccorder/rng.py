"""Portable SplitMix64 random stream.

Everything random in the package (orderings, restart initial points) is drawn
from this generator so that a seed means the same thing in any language:

* ``next_u64``: state += 0x9E3779B97F4A7C15, then the SplitMix64 finalizer.
* ``uniform``: top 53 bits of ``next_u64`` scaled by 2**-53, giving [0, 1).
* ``randbelow(n)``: rejection sampling on ``next_u64`` with the bias zone
  ``2**64 % n`` removed from the bottom of the range.
* ``shuffle``: Fisher-Yates from the last position down, ``j = randbelow(i + 1)``.
* ``substream_seed(seed, *keys)``: fold each key into the seed with
  ``mix(seed ^ mix(key + GOLDEN))``.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def substream_seed(seed: int, *keys: int) -> int:
    s = seed & MASK64
    for key in keys:
        s = mix64(s ^ mix64((key + GOLDEN) & MASK64))
    return s


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * (1.0 / (1 << 53))
        return low + (high - low) * u

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        threshold = (1 << 64) % n
        while True:
            r = self.next_u64()
            if r >= threshold:
                return r % n

    def shuffle(self, items: list) -> list:
        out = list(items)
        for i in range(len(out) - 1, 0, -1):
            j = self.randbelow(i + 1)
            out[i], out[j] = out[j], out[i]
        return out
