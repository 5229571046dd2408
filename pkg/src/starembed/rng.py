"""Pinned random number generation.

Every random draw in the package comes from numpy's ``PCG64`` bit generator
seeded through ``SeedSequence``.  Both are platform independent, so a given
seed reproduces the same sequences and traces everywhere.
"""
from __future__ import annotations

import numpy as np

GENERATOR_NAME = "numpy.PCG64/SeedSequence"


def make_rng(seed: int | tuple[int, ...] | list[int]) -> np.random.Generator:
    entropy = list(seed) if isinstance(seed, (tuple, list)) else int(seed)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def derive_seeds(master_seed: int, count: int) -> list[int]:
    """Child seeds for trials ``0..count-1``.

    Word ``i`` of the master ``SeedSequence`` output does not depend on how
    many words are requested, so each child seed is a pure function of
    ``(master_seed, i)`` and batches agree with :func:`derive_seed`.
    """
    if count <= 0:
        return []
    words = np.random.SeedSequence(int(master_seed)).generate_state(count, dtype=np.uint64)
    return [int(w) >> 1 for w in words]


def derive_seed(master_seed: int, index: int) -> int:
    """Child seed for trial ``index``; a pure function of its two arguments."""
    if index < 0:
        raise ValueError("index must be non-negative")
    return derive_seeds(master_seed, index + 1)[index]


def uniform_index(rng: np.random.Generator, k: int) -> int:
    """Uniform draw from range(k) consuming exactly one generator event."""
    return min(int(rng.random() * k), k - 1)
