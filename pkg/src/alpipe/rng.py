"""Deterministic, splittable random streams.

Streams are keyed by (root_seed, purpose, counter) through SHA-256 into a
Philox counter-based generator, so the same key yields the same variate
sequence on every platform and distinct keys give independent streams.
"""

import hashlib

import numpy as np


class RngStream:
    """A reproducible random stream bound to (root_seed, purpose, counter)."""

    def __init__(self, root_seed: int, purpose: str, counter: int = 0):
        self.root_seed = int(root_seed)
        self.purpose = purpose
        self.counter = int(counter)
        digest = hashlib.sha256(
            f"{self.root_seed}:{self.purpose}:{self.counter}".encode()
        ).digest()
        key = np.frombuffer(digest[:16], dtype=np.uint64)
        self.gen = np.random.Generator(np.random.Philox(key=key))

    def words(self, n: int):
        """n uniform 64-bit words."""
        return self.gen.integers(0, 2**64, size=n, dtype=np.uint64)

    def uniform(self, n=None):
        return self.gen.random(n)

    def gaussian(self, n=None):
        return self.gen.standard_normal(n)

    def gumbel(self, n=None):
        return self.gen.gumbel(size=n)

    def integers(self, low, high=None, size=None):
        return self.gen.integers(low, high, size=size)

    def choice(self, n, size, replace=False, p=None):
        return self.gen.choice(n, size=size, replace=replace, p=p)

    def permutation(self, n):
        return self.gen.permutation(n)

    def __repr__(self):
        return f"RngStream({self.root_seed}, {self.purpose!r}, {self.counter})"


def derive_stream(root_seed: int, purpose: str, counter: int = 0) -> RngStream:
    """Derive an independent reproducible stream for one purpose."""
    return RngStream(root_seed, purpose, counter)
