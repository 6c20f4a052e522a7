"""Reproducible random streams.

A master seed is split into independent streams keyed by
``(chunk_index, stream_index)`` through :class:`numpy.random.SeedSequence`,
whose spawn keys are mixed into the entropy pool by a fixed 32-bit hash.
Paths are simulated in chunks of :data:`CHUNK` so the draws seen by a path
depend only on the master seed and the path index, never on thread count.
"""
from __future__ import annotations

from typing import Union

import numpy as np

CHUNK = 1024

RADIAL, ANGULAR, KILLING, STABLE = 0, 1, 2, 3

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


def as_seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(seed.integers(0, 2**63, size=2).tolist())
    return np.random.SeedSequence(seed)


def stream(seed: SeedLike, chunk_index: int, stream_index: int) -> np.random.Generator:
    ss = as_seed_sequence(seed)
    child = np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + (chunk_index, stream_index))
    return np.random.default_rng(child)


def split(seed: SeedLike, n: int) -> list[np.random.SeedSequence]:
    """``n`` independent child seeds (used to separate the two samples of a test).

    Same children as ``SeedSequence.spawn`` on a fresh sequence, but without
    mutating the argument, so repeated calls agree.
    """
    ss = as_seed_sequence(seed)
    return [np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + (i,)) for i in range(n)]


def chunks(n: int, size: int = CHUNK):
    """Yield ``(chunk_index, count)`` covering ``n`` paths."""
    for k, start in enumerate(range(0, n, size)):
        yield k, min(size, n - start)
