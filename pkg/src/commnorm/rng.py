"""Deterministic RNG substreams derived from one 64-bit master seed.

Every randomized component takes an explicit numpy Generator.  Substreams
are derived from (seed, label, shard) so that parallel shards and
independent pipeline phases never share a stream, and re-running with the
same master seed reproduces every draw bit for bit.
"""
from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1


def substream(seed: int, label: str, shard: int = 0) -> np.random.Generator:
    """Generator for (seed, label, shard); stable across runs and platforms."""
    digest = hashlib.sha256(f"{label}#{shard}".encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 8], "little") for i in range(0, 32, 8)]
    seq = np.random.SeedSequence([seed & MASK64, *words])
    return np.random.Generator(np.random.PCG64(seq))


def spawn(rng: np.random.Generator, count: int) -> list[np.random.Generator]:
    """Split an existing generator into independent children."""
    return [np.random.Generator(np.random.PCG64(s)) for s in rng.bit_generator.seed_seq.spawn(count)]
