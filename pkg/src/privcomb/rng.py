"""Reproducible, splittable random streams.

Every randomized routine in the package takes an :class:`RngStream`.  A stream
is identified by ``(seed, stream)`` plus an optional path of child indices, and
is backed by numpy's counter-based Philox bit generator, so two streams with
the same identity produce bit-identical draws.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np


class RngStream:
    """A stateful random stream derived from ``(seed, stream, *path)``.

    Draws advance the stream.  ``child(i)`` returns an independent stream whose
    identity extends this one's path with ``i``; children do not depend on how
    many draws the parent has already made.
    """

    def __init__(self, seed: int, stream: int = 0, path: Sequence[int] = ()):
        if seed < 0 or stream < 0 or any(p < 0 for p in path):
            raise ValueError("seed, stream and path entries must be natural numbers")
        self.seed = int(seed)
        self.stream = int(stream)
        self.path = tuple(int(p) for p in path)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream, *self.path))
        self.generator = np.random.Generator(np.random.Philox(ss))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream={self.stream}, path={self.path})"

    def child(self, index: int) -> RngStream:
        return RngStream(self.seed, self.stream, (*self.path, index))

    def random(self, size=None):
        return self.generator.random(size)

    def integers(self, low: int, high: int | None = None, size=None):
        return self.generator.integers(low, high, size=size)

    def laplace(self, scale: float, size=None):
        return self.generator.laplace(0.0, scale, size)

    def permutation(self, items):
        """Uniformly random ordering of ``items`` (returned as a list)."""
        items = list(items)
        order = self.generator.permutation(len(items))
        return [items[i] for i in order]

    def choice_index(self, weights) -> int:
        """Index drawn with probability proportional to nonnegative ``weights``."""
        cum = np.cumsum(np.asarray(weights, dtype=float))
        total = cum[-1]
        if not total > 0:
            raise ValueError("weights must have positive total mass")
        idx = int(np.searchsorted(cum, self.generator.random() * total, side="right"))
        return min(idx, len(cum) - 1)
