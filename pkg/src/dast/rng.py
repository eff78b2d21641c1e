"""Deterministic counter-based random streams.

The generator is SplitMix64 driven in counter mode: draw ``i`` (0-based) of
a stream with 64-bit key ``k`` is ``mix64((k + (i+1)*GOLDEN) mod 2**64)``,
where ``mix64`` is the SplitMix64 finalizer and GOLDEN is the 64-bit golden
gamma. This is exactly the canonical SplitMix64 sequence seeded with ``k``,
but stateless per draw, so streams can be split per work item and replayed
in any order.

Substreams are derived with ``derive_key(seed, index)``; two substreams of
the same seed never overlap in practice because the finalizer is a bijection
applied to well-separated inputs.

Gaussians use Box-Muller (two uniforms per draw, cosine branch only, no
caching), so any implementation of the same recipe reproduces the stream
value for value.
"""

import math

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a 64-bit bijective mixing function."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_key(seed: int, index: int) -> int:
    """Key of substream `index` of `seed`. Deterministic, order-free."""
    return mix64((mix64(seed) + ((index + 1) * _GOLDEN)) & _MASK64)


class CounterRng:
    """Sequential view over one counter-based stream."""

    def __init__(self, key: int):
        self.key = key & _MASK64
        self.counter = 0

    def next_uint64(self) -> int:
        self.counter += 1
        return mix64((self.key + self.counter * _GOLDEN) & _MASK64)

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_uint64() >> 11) * 2.0**-53

    def bernoulli(self, p: float) -> bool:
        return self.uniform() < p

    def gaussian(self) -> float:
        """Standard normal via Box-Muller, cosine branch.

        Uses 1-u1 so the log argument lies in (0, 1]; consumes exactly two
        uniforms per call.
        """
        u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(1.0 - u1))
        return r * math.cos(2.0 * math.pi * u2)
