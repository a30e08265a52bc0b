"""Seeded random streams.

Every random quantity is drawn from a named substream of a single 64-bit
master seed. A substream is the PCG64 generator seeded by
``SeedSequence(entropy=seed, spawn_key=key)`` where ``key`` is a tuple of small
integers derived from the stream name, so draws for (say) input weights and
biases never overlap and do not depend on the order in which other streams
are consumed.
"""
from __future__ import annotations

import zlib

import numpy as np

__all__ = ["stream", "stream_key", "derive_seed"]

MASK64 = (1 << 64) - 1


def stream_key(*parts) -> tuple[int, ...]:
    """Map a path of names/integers to a ``spawn_key`` tuple."""
    key = []
    for p in parts:
        if isinstance(p, (int, np.integer)):
            key.append(int(p))
        else:
            key.append(zlib.crc32(str(p).encode("utf-8")))
    return tuple(key)


def stream(seed: int, *parts) -> np.random.Generator:
    """Independent generator for the substream ``parts`` of ``seed``."""
    if int(seed) != seed or seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed!r}")
    ss = np.random.SeedSequence(entropy=int(seed) & MASK64, spawn_key=stream_key(*parts))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *parts) -> int:
    """A 64-bit seed for the substream ``parts``; used where an API takes a seed."""
    ss = np.random.SeedSequence(entropy=int(seed) & MASK64, spawn_key=stream_key(*parts))
    return int(ss.generate_state(1, np.uint64)[0])
