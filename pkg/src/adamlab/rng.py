"""Splittable, order-independent random number generation.

Every random draw in the library flows through :func:`rng_for`, which keys a
counter-based Philox generator by ``(master_seed, purpose, *indices)``. Two
calls with the same key always yield the same stream, regardless of process,
thread, or call order, so parallel sweeps reproduce bit-for-bit.
"""

import hashlib

import numpy as np


def _key(master_seed: int, purpose: str, indices: tuple[int, ...]) -> int:
    payload = repr((int(master_seed), purpose, tuple(int(i) for i in indices)))
    digest = hashlib.sha256(payload.encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "little")


def rng_for(master_seed: int, purpose: str, *indices: int) -> np.random.Generator:
    """Return a fresh Generator keyed by (master_seed, purpose, *indices)."""
    return np.random.Generator(np.random.Philox(key=_key(master_seed, purpose, indices)))


def derive_seed(master_seed: int, purpose: str, *indices: int) -> int:
    """Deterministically mix a master seed and indices into a plain int seed."""
    return _key(master_seed, purpose, indices) & 0xFFFFFFFFFFFFFFFF
