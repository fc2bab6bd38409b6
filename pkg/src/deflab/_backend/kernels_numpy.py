"""Pure-numpy twins of the numba kernels.

Same key chain, same rejection rule, same outputs bit-for-bit; selected
when numba is unavailable or DEFLAB_BACKEND=numpy. Vectorizes over sample
blocks and pair/triple index tables instead of explicit loops.
"""
from __future__ import annotations

import numpy as np

from .common import MIX_M1, MIX_M2, PHI, TYPE_LUT

U64 = np.uint64
_PHI = U64(PHI)
_M1 = U64(MIX_M1)
_M2 = U64(MIX_M2)

_BLOCK_ELEMS = 1 << 22  # keep intermediate arrays around 32 MB


def _mix64(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):  # u64 wraparound is the point
        z = (z ^ (z >> U64(30))) * _M1
        z = (z ^ (z >> U64(27))) * _M2
        return z ^ (z >> U64(31))


def _draw(keys: np.ndarray, rem: np.uint64, n64: np.uint64) -> np.ndarray:
    u = _mix64(keys)
    if rem:
        while True:
            bad = u < rem
            if not bad.any():
                break
            with np.errstate(over="ignore"):
                u[bad] = _mix64(u[bad] + _PHI)
    return (u % n64).astype(np.int64)


def _rem(n: int) -> np.uint64:
    with np.errstate(over="ignore"):
        return (U64(0) - U64(n)) % U64(n)


def _sample_hashes(seed: int, m0: int, m_count: int) -> np.ndarray:
    h1 = _mix64(U64(seed) ^ _PHI)
    idx = (U64(m0) + np.arange(m_count, dtype=np.uint64)).astype(np.uint64)
    return _mix64(h1 ^ idx)


def _popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x).astype(np.int64)


def _pair_arrays(n: int) -> tuple[np.ndarray, ...]:
    iu, ju = np.triu_indices(n, 1)
    iu = iu.astype(np.int64)
    ju = ju.astype(np.int64)
    c_ij = (iu * n + ju).astype(np.uint64)
    c_ji = (ju * n + iu).astype(np.uint64)
    return iu, ju, c_ij, c_ji


def _pair_block_values(h2s, n, iu, ju, c_ij, c_ji, rem, n64):
    """(a, b, c, d) value arrays of shape (block, n_pairs)."""
    diag_cells = (np.arange(n, dtype=np.uint64) * U64(n + 1)).astype(np.uint64)
    diag = _draw(h2s[:, None] ^ diag_cells[None, :], rem, n64)
    a = diag[:, iu]
    dd = diag[:, ju]
    b = _draw(h2s[:, None] ^ c_ij[None, :], rem, n64)
    c = _draw(h2s[:, None] ^ c_ji[None, :], rem, n64)
    return a, b, c, dd


def _distinct4(a, b, c, dd):
    return (
        1
        + (b != a)
        + ((c != a) & (c != b))
        + ((dd != a) & (dd != b) & (dd != c))
    ).astype(np.int64)


def _type_codes(a, b, c, dd):
    code = (b != a) + 2 * (c != a) + 4 * (dd != a)
    return TYPE_LUT[code]


def _block_size(m_count: int, per_sample: int) -> int:
    return max(1, min(m_count, _BLOCK_ELEMS // max(per_sample, 1)))


def pair_stats(n, seed, m0, m_count):
    out = np.zeros((m_count, 12), dtype=np.int64)
    n64, rem = U64(n), _rem(n)
    iu, ju, c_ij, c_ji = _pair_arrays(n)
    n_pairs = iu.size
    h2_all = _sample_hashes(seed, m0, m_count)
    block = _block_size(m_count, n_pairs)
    for lo in range(0, m_count, block):
        hi = min(lo + block, m_count)
        a, b, c, dd = _pair_block_values(h2_all[lo:hi], n, iu, ju, c_ij, c_ji, rem, n64)
        rows = np.repeat(np.arange(hi - lo, dtype=np.int64), n_pairs).reshape(
            hi - lo, n_pairs
        )
        dist = _distinct4(a, b, c, dd)
        size_hist = np.bincount(
            (rows * 4 + dist - 1).ravel(), minlength=(hi - lo) * 4
        ).reshape(hi - lo, 4)
        valid = dist <= 2
        tcode = _type_codes(a, b, c, dd)
        type_hist = np.bincount(
            (rows[valid] * 8 + tcode[valid]).ravel(), minlength=(hi - lo) * 8
        ).reshape(hi - lo, 8)
        out[lo:hi, 0:8] = type_hist
        out[lo:hi, 8:12] = size_hist
    return out


def pair_presence(n, seed, m0, m_count, eps, type_code):
    out = np.zeros(m_count, dtype=np.uint8)
    thresh = 2 + eps
    n64, rem = U64(n), _rem(n)
    iu, ju, c_ij, c_ji = _pair_arrays(n)
    h2_all = _sample_hashes(seed, m0, m_count)
    block = _block_size(m_count, iu.size)
    for lo in range(0, m_count, block):
        hi = min(lo + block, m_count)
        a, b, c, dd = _pair_block_values(h2_all[lo:hi], n, iu, ju, c_ij, c_ji, rem, n64)
        dist = _distinct4(a, b, c, dd)
        if type_code >= 0:
            qual = (dist <= 2) & (_type_codes(a, b, c, dd) == type_code)
        else:
            qual = dist <= thresh
        out[lo:hi] = qual.any(axis=1).astype(np.uint8)
    return out


def _triple_arrays(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pair-table indices (ij, ik, jk) for every triple i < j < k."""
    tri = np.array(
        [
            (i, j, k)
            for i in range(n - 2)
            for j in range(i + 1, n - 1)
            for k in range(j + 1, n)
        ],
        dtype=np.int64,
    ).reshape(-1, 3)
    i, j, k = tri[:, 0], tri[:, 1], tri[:, 2]

    def pidx(x, y):
        return x * n - (x * (x + 1)) // 2 + y - x - 1

    return pidx(i, j), pidx(i, k), pidx(j, k)


def triple_counts(n, seed, m0, m_count, eps, presence_only):
    out = np.zeros(m_count, dtype=np.int64)
    thresh = 3 + eps
    if thresh < 1:
        return out
    n64, rem = U64(n), _rem(n)
    words = (n + 63) >> 6
    iu, ju, _, _ = _pair_arrays(n)
    n_pairs = iu.size
    cells = np.arange(n * n, dtype=np.uint64)
    block_cells = np.stack(
        [iu * n + iu, iu * n + ju, ju * n + iu, ju * n + ju]
    ).astype(np.int64)
    pij, pik, pjk = _triple_arrays(n)
    h2_all = _sample_hashes(seed, m0, m_count)
    word_ids = np.arange(words, dtype=np.int64)
    for m in range(m_count):
        tab = _draw(h2_all[m] ^ cells, rem, n64)
        masks = np.zeros((n_pairs, words), dtype=np.uint64)
        for corner in range(4):
            v = tab[block_cells[corner]]
            bits = (U64(1) << (v & 63).astype(np.uint64)).astype(np.uint64)
            for w in range(words):
                masks[:, w] |= np.where((v >> 6) == word_ids[w], bits, U64(0))
        good = _popcount(masks).sum(axis=1) <= thresh
        keep = np.nonzero(good[pij])[0]
        if keep.size == 0:
            continue
        union = masks[pij[keep]] | masks[pik[keep]] | masks[pjk[keep]]
        hit = _popcount(union).sum(axis=1) <= thresh
        out[m] = 1 if (presence_only and hit.any()) else int(hit.sum())
    return out


def dary_pair_counts(n, d, seed, m0, m_count, eps, presence_only):
    out = np.zeros(m_count, dtype=np.int64)
    thresh = 2 + eps
    if thresh < 1:
        return out
    n64, rem = U64(n), _rem(n)
    iu, ju, _, _ = _pair_arrays(n)
    n_cells = 1 << d
    pats = np.arange(n_cells, dtype=np.int64)
    flat = np.zeros((iu.size, n_cells), dtype=np.uint64)
    for t in range(d):
        pick_j = (pats >> t) & 1
        coord = np.where(pick_j[None, :] == 1, ju[:, None], iu[:, None])
        flat = flat * n64 + coord.astype(np.uint64)
    h2_all = _sample_hashes(seed, m0, m_count)
    block = _block_size(m_count, iu.size * n_cells)
    for lo in range(0, m_count, block):
        hi = min(lo + block, m_count)
        vals = _draw(h2_all[lo:hi, None, None] ^ flat[None, :, :], rem, n64)
        vals.sort(axis=2)
        dist = 1 + (np.diff(vals, axis=2) != 0).sum(axis=2)
        qual = dist <= thresh
        if presence_only:
            out[lo:hi] = qual.any(axis=1).astype(np.int64)
        else:
            out[lo:hi] = qual.sum(axis=1)
    return out


_CHUNK_TABLES = 1 << 16


def _table_values(n: int, t0: int, count: int) -> np.ndarray:
    """(count, n*n) cell values of the dense table index range."""
    idx = (U64(t0) + np.arange(count, dtype=np.uint64)).astype(np.uint64)
    pows = (U64(n) ** np.arange(n * n, dtype=np.uint64)).astype(np.uint64)
    return ((idx[:, None] // pows[None, :]) % U64(n)).astype(np.int64)


def exhaustive_pairs(n, eps, type_code, t0, t_count):
    thresh = 2 + eps
    iu, ju, _, _ = _pair_arrays(n)
    hit_tables = 0
    total_hits = 0
    for lo in range(0, t_count, _CHUNK_TABLES):
        count = min(_CHUNK_TABLES, t_count - lo)
        vals = _table_values(n, t0 + lo, count)
        a = vals[:, iu * n + iu]
        b = vals[:, iu * n + ju]
        c = vals[:, ju * n + iu]
        dd = vals[:, ju * n + ju]
        dist = _distinct4(a, b, c, dd)
        if type_code >= 0:
            qual = (dist <= 2) & (_type_codes(a, b, c, dd) == type_code)
        else:
            qual = dist <= thresh
        per_table = qual.sum(axis=1)
        hit_tables += int((per_table > 0).sum())
        total_hits += int(per_table.sum())
    return hit_tables, total_hits


def exhaustive_triples(n, eps, t0, t_count):
    thresh = 3 + eps
    if thresh < 1:
        return 0, 0
    triples = [
        (i, j, k)
        for i in range(n - 2)
        for j in range(i + 1, n - 1)
        for k in range(j + 1, n)
    ]
    cell_cols = np.array(
        [[u * n + w for u in t for w in t] for t in triples], dtype=np.int64
    )
    hit_tables = 0
    total_hits = 0
    for lo in range(0, t_count, _CHUNK_TABLES):
        count = min(_CHUNK_TABLES, t_count - lo)
        vals = _table_values(n, t0 + lo, count)
        sub = vals[:, cell_cols]  # (count, n_triples, 9)
        sub = np.sort(sub, axis=2)
        dist = 1 + (np.diff(sub, axis=2) != 0).sum(axis=2)
        per_table = (dist <= thresh).sum(axis=1)
        hit_tables += int((per_table > 0).sum())
        total_hits += int(per_table.sum())
    return hit_tables, total_hits


def cell_values(n, d, seed, sample_index, flat_cells):
    n64, rem = U64(n), _rem(n)
    h2 = _sample_hashes(seed, sample_index, 1)[0]
    return _draw(h2 ^ flat_cells.astype(np.uint64), rem, n64)


def warmup() -> None:
    """Nothing to compile; present for backend interface symmetry."""
