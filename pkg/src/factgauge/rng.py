"""Deterministic keyed random streams.

Every randomized step in the pipeline draws from a generator keyed by
(seed, purpose, *parts). The key is hashed, so streams are independent of
scheduling, worker count, and iteration order, and stable across platforms.
"""

from __future__ import annotations

import hashlib

import numpy as np


def keyed_rng(seed: int, *parts: object) -> np.random.Generator:
    """Generator for the stream identified by (seed, *parts).

    Parts are length-prefixed before hashing so distinct keys cannot
    collide by concatenation (e.g. ("ab", "c") vs ("a", "bc")).
    """
    h = hashlib.sha256()
    h.update(str(int(seed)).encode("ascii"))
    for part in parts:
        piece = str(part).encode("utf-8")
        h.update(b"|%d|" % len(piece))
        h.update(piece)
    words = np.frombuffer(h.digest(), dtype=np.uint32)
    return np.random.default_rng(np.random.SeedSequence(words.tolist()))


def choice(rng: np.random.Generator, items: list) -> object:
    """Uniform pick that works for lists of tuples without numpy coercion."""
    return items[int(rng.integers(len(items)))]
