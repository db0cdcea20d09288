"""Per-node random streams.

Each ``(seed, node, purpose)`` triple keys its own Philox counter stream, so
drawing at one node never shifts the sequence seen by another.  Bernoulli
draws compare a raw 64-bit word against ``floor(p * 2**64)`` computed exactly,
which keeps every decision reproducible across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

MASK64 = (1 << 64) - 1
TWO64 = 1 << 64

# purpose tags
ENGINE = 0
COLORING = 1


class NodeStream:
    __slots__ = ("seed", "node", "purpose", "_bits", "draws")

    def __init__(self, seed: int, node: int, purpose: int = ENGINE):
        if not 0 <= node < (1 << 48):
            raise ValueError("node id out of range for stream derivation")
        self.seed = seed & MASK64
        self.node = node
        self.purpose = purpose
        self._bits = None
        self.draws = 0

    def raw64(self) -> int:
        if self._bits is None:
            # built on first use: most nodes of a deterministic run never draw
            key = self.seed | (((self.purpose & 0xFFFF) << 48 | self.node) << 64)
            self._bits = np.random.Philox(key=key)
        self.draws += 1
        return int(self._bits.random_raw())

    def bernoulli(self, p: Fraction) -> bool:
        """True with probability ``floor(p * 2**64) / 2**64``."""
        p = Fraction(p)
        if not 0 <= p <= 1:
            raise ValueError(f"probability out of range: {p}")
        threshold = (p.numerator * TWO64) // p.denominator
        return self.raw64() < threshold

    def below(self, c: int) -> int:
        """Uniform integer in ``[0, c)`` by rejection sampling."""
        if c < 1:
            raise ValueError("c must be positive")
        if c == 1:
            return 0
        limit = TWO64 - (TWO64 % c)
        while True:
            x = self.raw64()
            if x < limit:
                return x % c


@dataclass(frozen=True)
class RandomTape:
    """A global seed plus a purpose tag; hands out one stream per node."""

    seed: int
    purpose: int = ENGINE

    def stream(self, node: int) -> NodeStream:
        return NodeStream(self.seed, node, self.purpose)
