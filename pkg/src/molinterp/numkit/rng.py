"""Named, reproducible random streams.

Every randomized stage draws from its own PCG64 generator. The stream for
stage ``name`` under master seed ``s`` is seeded with
``SeedSequence(s, spawn_key=(crc32(name),))``, so adding or reordering stages
never shifts another stage's numbers. There is no global RNG state.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def seed_sequence(master: int, *names: str) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(master), spawn_key=tuple(_key(n) for n in names))


def make_rng(master: int, *names: str) -> np.random.Generator:
    """Generator for the stage path ``names`` (e.g. ``make_rng(7, "probe", "amide")``)."""
    return np.random.Generator(np.random.PCG64(seed_sequence(master, *names)))


def derive_seed(master: int, *names: str) -> int:
    """A 63-bit integer seed for the named stage, for recording in manifests."""
    return int(seed_sequence(master, *names).generate_state(1, np.uint64)[0] >> np.uint64(1))


def split_indices(n: int, test_fraction: float, master: int, name: str = "split") -> tuple[np.ndarray, np.ndarray]:
    """Seeded shuffle split; returns sorted (train, test) index arrays."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    perm = make_rng(master, name).permutation(n)
    n_test = max(1, int(round(n * test_fraction))) if n > 1 else 0
    return np.sort(perm[n_test:]), np.sort(perm[:n_test])
