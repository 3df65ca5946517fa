"""Random stream plumbing.

Every simulation entry point takes a ``seed`` that may be an integer, a
``numpy.random.SeedSequence`` or a ready ``Generator``. Replicates derive
their streams from ``(base_seed, index, ...)`` so results do not depend on
the order in which replicates are executed.
"""
from __future__ import annotations

from typing import Union

import numpy as np

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


def seed_sequence(seed: SeedLike, *keys: int) -> np.random.SeedSequence:
    if isinstance(seed, np.random.Generator):
        raise TypeError("a Generator cannot be re-keyed; pass an int or SeedSequence")
    if isinstance(seed, np.random.SeedSequence):
        if not keys:
            return seed
        entropy = seed.entropy
        base = list(entropy) if isinstance(entropy, (list, tuple)) else [entropy]
        return np.random.SeedSequence(base + list(seed.spawn_key) + [int(k) for k in keys])
    if seed is None:
        seed = 0
    if int(seed) < 0:
        raise ValueError("seed must be nonnegative")
    return np.random.SeedSequence([int(seed)] + [int(k) for k in keys])


def make_rng(seed: SeedLike, *keys: int) -> np.random.Generator:
    if isinstance(seed, np.random.Generator) and not keys:
        return seed
    return np.random.default_rng(seed_sequence(seed, *keys))


def child_sequences(seed: SeedLike, count: int) -> list[np.random.SeedSequence]:
    """Independent child sequences, stable under a fixed seed."""
    return [seed_sequence(seed, 0x5EED, i) for i in range(count)]
