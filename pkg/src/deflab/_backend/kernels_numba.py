"""Hot sampling and enumeration kernels, numba-compiled.

Every kernel writes per-sample (or per-table-chunk) results that depend
only on (seed, sample index, cell index), so output is bit-identical at
any thread count. The pure-numpy twins in kernels_numpy implement the
same contracts; tests hold the two backends to exact equality.
"""
from __future__ import annotations

import numpy as np
from numba import njit, prange

from .common import MIX_M1, MIX_M2, PHI, TYPE_LUT

U64 = np.uint64
_PHI = U64(PHI)
_M1 = U64(MIX_M1)
_M2 = U64(MIX_M2)
_LUT = TYPE_LUT.copy()


@njit(inline="always")
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _M1
    z = (z ^ (z >> U64(27))) * _M2
    return z ^ (z >> U64(31))


@njit(inline="always")
def _draw(h2, cell, rem, n64):
    u = _mix64(h2 ^ cell)
    while u < rem:
        u = _mix64(u + _PHI)
    return u % n64


@njit(inline="always")
def _popcount64(x):
    x = x - ((x >> U64(1)) & U64(0x5555555555555555))
    x = (x & U64(0x3333333333333333)) + ((x >> U64(2)) & U64(0x3333333333333333))
    x = (x + (x >> U64(4))) & U64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * U64(0x0101010101010101)) >> U64(56))


@njit(cache=True, parallel=True)
def pair_stats(n, seed, m0, m_count):
    """Per-sample pair census at arity 2: type counts T0..T7, then counts
    of pairs with exactly 1, 2, 3, 4 distinct block values."""
    out = np.zeros((m_count, 12), dtype=np.int64)
    n64 = U64(n)
    rem = (U64(0) - n64) % n64
    h1 = _mix64(U64(seed) ^ _PHI)
    for m in prange(m_count):
        h2 = _mix64(h1 ^ U64(m0 + m))
        diag = np.empty(n, dtype=np.int64)
        for i in range(n):
            diag[i] = np.int64(_draw(h2, U64(i) * n64 + U64(i), rem, n64))
        cnt = np.zeros(12, dtype=np.int64)
        for i in range(n - 1):
            a = diag[i]
            row_i = U64(i) * n64
            for j in range(i + 1, n):
                dd = diag[j]
                b = np.int64(_draw(h2, row_i + U64(j), rem, n64))
                c = np.int64(_draw(h2, U64(j) * n64 + U64(i), rem, n64))
                dist = 1
                if b != a:
                    dist += 1
                if c != a and c != b:
                    dist += 1
                if dd != a and dd != b and dd != c:
                    dist += 1
                cnt[7 + dist] += 1
                if dist <= 2:
                    code = 0
                    if b != a:
                        code += 1
                    if c != a:
                        code += 2
                    if dd != a:
                        code += 4
                    cnt[_LUT[code]] += 1
        out[m] = cnt
    return out


@njit(cache=True, parallel=True)
def pair_presence(n, seed, m0, m_count, eps, type_code):
    """Per-sample indicator of a qualifying pair, early-exiting the scan.

    type_code >= 0 asks for that exact type; otherwise a pair qualifies
    when its block has at most 2 + eps distinct values. Diagonal cells are
    materialized first, then pairs are scanned in lexicographic order.
    """
    out = np.zeros(m_count, dtype=np.uint8)
    thresh = 2 + eps
    n64 = U64(n)
    rem = (U64(0) - n64) % n64
    h1 = _mix64(U64(seed) ^ _PHI)
    for m in prange(m_count):
        h2 = _mix64(h1 ^ U64(m0 + m))
        diag = np.empty(n, dtype=np.int64)
        for i in range(n):
            diag[i] = np.int64(_draw(h2, U64(i) * n64 + U64(i), rem, n64))
        hit = False
        for i in range(n - 1):
            a = diag[i]
            row_i = U64(i) * n64
            for j in range(i + 1, n):
                dd = diag[j]
                b = np.int64(_draw(h2, row_i + U64(j), rem, n64))
                c = np.int64(_draw(h2, U64(j) * n64 + U64(i), rem, n64))
                dist = 1
                if b != a:
                    dist += 1
                if c != a and c != b:
                    dist += 1
                if dd != a and dd != b and dd != c:
                    dist += 1
                if type_code >= 0:
                    if dist <= 2:
                        code = 0
                        if b != a:
                            code += 1
                        if c != a:
                            code += 2
                        if dd != a:
                            code += 4
                        hit = _LUT[code] == type_code
                elif dist <= thresh:
                    hit = True
                if hit:
                    break
            if hit:
                break
        out[m] = 1 if hit else 0
    return out


@njit(inline="always")
def _pair_index(i, j, n):
    # upper-triangle rank of (i, j), i < j
    return i * n - (i * (i + 1)) // 2 + j - i - 1


@njit(cache=True, parallel=True)
def triple_counts(n, seed, m0, m_count, eps, presence_only):
    """Per-sample count (or early-exit indicator) of 3-subsets whose 9-cell
    block takes at most 3 + eps distinct values.

    Works on per-pair value bitsets: the three pair blocks of {i,j,k}
    exactly cover the nine cells, so the subset image is the union of the
    three masks. Pairs whose own block already exceeds the threshold
    prune their triples.
    """
    out = np.zeros(m_count, dtype=np.int64)
    thresh = 3 + eps
    if thresh < 1:
        return out
    n64 = U64(n)
    rem = (U64(0) - n64) % n64
    h1 = _mix64(U64(seed) ^ _PHI)
    words = (n + 63) >> 6
    n_pairs = n * (n - 1) // 2
    for m in prange(m_count):
        h2 = _mix64(h1 ^ U64(m0 + m))
        tab = np.empty(n * n, dtype=np.int64)
        for cell in range(n * n):
            tab[cell] = np.int64(_draw(h2, U64(cell), rem, n64))
        masks = np.zeros((n_pairs, words), dtype=np.uint64)
        pair_pc = np.empty(n_pairs, dtype=np.int64)
        p = 0
        for i in range(n - 1):
            for j in range(i + 1, n):
                for v in (tab[i * n + i], tab[i * n + j], tab[j * n + i], tab[j * n + j]):
                    masks[p, v >> 6] |= U64(1) << U64(v & 63)
                pc = 0
                for w in range(words):
                    pc += _popcount64(masks[p, w])
                pair_pc[p] = pc
                p += 1
        cnt = 0
        done = False
        for i in range(n - 2):
            for j in range(i + 1, n - 1):
                pij = _pair_index(i, j, n)
                if pair_pc[pij] > thresh:
                    continue
                for k in range(j + 1, n):
                    pik = _pair_index(i, k, n)
                    pjk = _pair_index(j, k, n)
                    total = 0
                    for w in range(words):
                        total += _popcount64(
                            masks[pij, w] | masks[pik, w] | masks[pjk, w]
                        )
                        if total > thresh:
                            break
                    if total <= thresh:
                        cnt += 1
                        if presence_only:
                            done = True
                            break
                if done:
                    break
            if done:
                break
        out[m] = cnt
    return out


@njit(cache=True, parallel=True)
def dary_pair_counts(n, d, seed, m0, m_count, eps, presence_only):
    """Per-sample count (or indicator) of 2-subsets of a d-ary table whose
    2^d-cell block takes at most 2 + eps distinct values."""
    out = np.zeros(m_count, dtype=np.int64)
    thresh = 2 + eps
    if thresh < 1:
        return out
    n64 = U64(n)
    rem = (U64(0) - n64) % n64
    h1 = _mix64(U64(seed) ^ _PHI)
    n_cells = 1 << d
    for m in prange(m_count):
        h2 = _mix64(h1 ^ U64(m0 + m))
        vals = np.empty(n_cells, dtype=np.int64)
        cnt = 0
        done = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                distinct = 0
                ok = True
                for pat in range(n_cells):
                    flat = U64(0)
                    for t in range(d):
                        coord = j if (pat >> t) & 1 else i
                        flat = flat * n64 + U64(coord)
                    v = np.int64(_draw(h2, flat, rem, n64))
                    fresh = True
                    for q in range(distinct):
                        if vals[q] == v:
                            fresh = False
                            break
                    if fresh:
                        if distinct >= thresh:
                            ok = False
                            break
                        vals[distinct] = v
                        distinct += 1
                if ok:
                    cnt += 1
                    if presence_only:
                        done = True
                        break
            if done:
                break
        out[m] = cnt
    return out


@njit(cache=True, parallel=True)
def exhaustive_pairs(n, eps, type_code, t0, t_count):
    """Scan the dense table range [t0, t0 + t_count): tables with at least
    one qualifying pair, and the total count of qualifying pairs.

    Table index digits, base n, are the cells in row-major order:
    value(i, j) = (index // n^(i*n+j)) % n.
    """
    thresh = 2 + eps
    pows = np.empty(n * n, dtype=np.uint64)
    acc = U64(1)
    for c in range(n * n):
        pows[c] = acc
        acc = acc * U64(n)
    n64 = U64(n)
    hit_tables = 0
    total_hits = 0
    for off in prange(t_count):
        t_idx = U64(t0 + off)
        local = 0
        for i in range(n - 1):
            a = np.int64((t_idx // pows[i * n + i]) % n64)
            for j in range(i + 1, n):
                b = np.int64((t_idx // pows[i * n + j]) % n64)
                c2 = np.int64((t_idx // pows[j * n + i]) % n64)
                dd = np.int64((t_idx // pows[j * n + j]) % n64)
                dist = 1
                if b != a:
                    dist += 1
                if c2 != a and c2 != b:
                    dist += 1
                if dd != a and dd != b and dd != c2:
                    dist += 1
                if type_code >= 0:
                    if dist <= 2:
                        code = 0
                        if b != a:
                            code += 1
                        if c2 != a:
                            code += 2
                        if dd != a:
                            code += 4
                        if _LUT[code] == type_code:
                            local += 1
                elif dist <= thresh:
                    local += 1
        if local > 0:
            hit_tables += 1
        total_hits += local
    return hit_tables, total_hits


@njit(cache=True, parallel=True)
def exhaustive_triples(n, eps, t0, t_count):
    """Like exhaustive_pairs but for 3-subsets with |image| <= 3 + eps."""
    thresh = 3 + eps
    pows = np.empty(n * n, dtype=np.uint64)
    acc = U64(1)
    for c in range(n * n):
        pows[c] = acc
        acc = acc * U64(n)
    n64 = U64(n)
    hit_tables = 0
    total_hits = 0
    for off in prange(t_count):
        t_idx = U64(t0 + off)
        local = 0
        if thresh >= 1:
            vals = np.empty(9, dtype=np.int64)
            for i in range(n - 2):
                for j in range(i + 1, n - 1):
                    for k in range(j + 1, n):
                        distinct = 0
                        ok = True
                        for u in (i, j, k):
                            for w in (i, j, k):
                                v = np.int64((t_idx // pows[u * n + w]) % n64)
                                fresh = True
                                for q in range(distinct):
                                    if vals[q] == v:
                                        fresh = False
                                        break
                                if fresh:
                                    if distinct >= thresh:
                                        ok = False
                                        break
                                    vals[distinct] = v
                                    distinct += 1
                            if not ok:
                                break
                        if ok:
                            local += 1
        if local > 0:
            hit_tables += 1
        total_hits += local
    return hit_tables, total_hits


@njit(cache=True)
def cell_values(n, d, seed, sample_index, flat_cells):
    """Values of the given flat cell indices in one sampled table."""
    n64 = U64(n)
    rem = (U64(0) - n64) % n64
    h2 = _mix64(_mix64(U64(seed) ^ _PHI) ^ U64(sample_index))
    out = np.empty(flat_cells.size, dtype=np.int64)
    for q in range(flat_cells.size):
        out[q] = np.int64(_draw(h2, U64(flat_cells[q]), rem, n64))
    return out


def warmup() -> None:
    """Force compilation of every kernel on tiny inputs."""
    pair_stats(2, 0, 0, 1)
    pair_presence(2, 0, 0, 1, 0, -1)
    triple_counts(3, 0, 0, 1, 0, True)
    dary_pair_counts(2, 3, 0, 0, 1, 0, True)
    exhaustive_pairs(2, 0, -1, 0, 4)
    exhaustive_triples(3, 0, 0, 2)
    cell_values(2, 2, 0, 0, np.arange(4, dtype=np.uint64))
