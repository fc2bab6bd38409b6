"""Counter-based random cell generation: constants and scalar reference.

The value of any Cayley cell depends only on (seed, sample_index, flat
cell index), never on scan order or worker count, so lazy evaluation,
early exit and parallel sampling are all bias-free and bit-reproducible.

The mixing function is the SplitMix64 finalizer (Stafford mix 13):

    mix64(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
              z ^= z >> 27; z *= 0x94D049BB133111EB;
              z ^= z >> 31

applied to the key chain (all arithmetic mod 2^64, PHI = 0x9E3779B97F4A7C15):

    h1 = mix64(seed ^ PHI)              # once per seed
    h2 = mix64(h1 ^ sample_index)       # once per sample
    u  = mix64(h2 ^ flat_cell_index)    # per cell

The draw rejects u < 2^64 mod n (redraw u <- mix64(u + PHI)) and returns
u mod n, which is exactly uniform on [0, n). An independent implementation
following this recipe reproduces every estimate bit-for-bit.
"""
from __future__ import annotations

import numpy as np

from ..core import TYPE_FROM_CODE

MASK64 = (1 << 64) - 1
PHI = 0x9E3779B97F4A7C15
MIX_M1 = 0xBF58476D1CE4E5B9
MIX_M2 = 0x94D049BB133111EB

# pair-statistics column layout: counts per type T0..T7, then counts of
# pairs whose 2x2 block has exactly 1, 2, 3, 4 distinct values
STAT_COLS = 12
TYPE_LUT = np.array([int(t) for t in TYPE_FROM_CODE], dtype=np.int64)


def mix64(z: int) -> int:
    """Scalar reference mix. Matches both compiled backends bit-for-bit."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_M1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_M2) & MASK64
    return z ^ (z >> 31)


def seed_hash(seed: int) -> int:
    return mix64((seed & MASK64) ^ PHI)


def sample_hash(h1: int, sample_index: int) -> int:
    return mix64(h1 ^ (sample_index & MASK64))


def draw(h2: int, flat_cell: int, n: int) -> int:
    """Uniform value in [0, n) for one cell, scalar reference path."""
    rem = (1 << 64) % n
    u = mix64(h2 ^ flat_cell)
    while u < rem:
        u = mix64((u + PHI) & MASK64)
    return u % n


def cell_value_scalar(seed: int, sample_index: int, n: int, flat_cell: int) -> int:
    return draw(sample_hash(seed_hash(seed), sample_index), flat_cell, n)
