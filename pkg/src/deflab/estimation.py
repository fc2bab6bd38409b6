"""Reproducible Monte Carlo and exhaustive estimation of deficiency events.

The sample space is the uniform distribution over all n^(n^d) operation
tables. Sampling is counter-based (see _backend.common): a cell's value is
a pure function of (seed, sample index, cell index), so estimates are
bit-identical across reruns, backends, scan orders and thread counts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

import numpy as np

from ._backend import get_backend, set_thread_count
from ._backend.common import cell_value_scalar
from .combinatorics import binomial, expected_count, limit_probability, limit_rate
from .core import OperationTable, PairType, SubsetQuery, deficient_subsets

__all__ = [
    "SamplerKey",
    "EstimateRecord",
    "CountHistogram",
    "SweepRow",
    "ExactResult",
    "cell_value",
    "sampled_table",
    "sample_indicator",
    "mc_probability",
    "pair_statistics",
    "per_type_presence",
    "count_distribution",
    "independence_check",
    "sweep",
    "exact_probability",
]

MAX_U64 = (1 << 64) - 1

# default exhaustive guard: n^(n^d) must stay below this without --force
EXHAUSTIVE_GUARD = 1 << 32
# hard ceiling even with --force (admits the 4^16 = 2^32 case, nothing bigger)
EXHAUSTIVE_CEILING = 1 << 33
_EXHAUSTIVE_CHUNK = 1 << 22


@dataclass(frozen=True)
class SamplerKey:
    """Addresses one sampled table: (seed, sample_index), both u64."""

    seed: int
    sample_index: int

    def __post_init__(self) -> None:
        for name, v in (("seed", self.seed), ("sample_index", self.sample_index)):
            if not 0 <= v <= MAX_U64:
                raise ValueError(f"{name} must fit in 64 bits, got {v}")


@dataclass(frozen=True)
class EstimateRecord:
    """One Monte Carlo estimate with its binomial error bars."""

    n: int
    d: int
    s: int
    eps: int
    type_filter: Optional[PairType]
    samples: int
    seed: int
    hits: int

    @property
    def p_hat(self) -> float:
        return self.hits / self.samples

    @property
    def stderr(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1.0 - p) / self.samples)

    @property
    def ci95(self) -> tuple[float, float]:
        p, se = self.p_hat, self.stderr
        return (p - 1.96 * se, p + 1.96 * se)

    def to_json_dict(self) -> dict:
        out = {
            "n": self.n,
            "d": self.d,
            "s": self.s,
            "eps": self.eps,
            "samples": self.samples,
            "seed": self.seed,
            "hits": self.hits,
            "p_hat": self.p_hat,
            "stderr": self.stderr,
            "ci95": list(self.ci95),
        }
        if self.type_filter is not None:
            out["type"] = self.type_filter.name
        return out


def cell_value(key: SamplerKey, n: int, coords: Sequence[int]) -> int:
    """Value in [0, n) of one Cayley cell of the sampled table.

    Pure scalar reference path; the compiled kernels reproduce it exactly.
    """
    if n < 1:
        raise ValueError(f"order must be positive, got {n}")
    if not coords:
        raise ValueError("coords must be nonempty")
    flat = 0
    for c in coords:
        if not 0 <= c < n:
            raise ValueError(f"coordinate {c} out of range [0, {n})")
        flat = flat * n + c
    return cell_value_scalar(key.seed, key.sample_index, n, flat)


def sampled_table(
    n: int, d: int, key: SamplerKey, backend: Optional[str] = None
) -> OperationTable:
    """Materialize the full sampled table (eager evaluation)."""
    n_cells = n**d
    if n_cells > 1 << 24:
        raise ValueError(f"table too large to materialize: {n}^{d} cells")
    kern = get_backend(backend)
    flat = np.arange(n_cells, dtype=np.uint64)
    entries = kern.cell_values(n, d, key.seed, key.sample_index, flat)
    return OperationTable(order=n, arity=d, entries=entries)


def _eager_indicator(n: int, query: SubsetQuery, key: SamplerKey, d: int) -> bool:
    table = sampled_table(n, d, key)
    return bool(deficient_subsets(table, query))


def _dispatch_counts(
    kern, n: int, d: int, query: SubsetQuery, seed: int, m0: int,
    m_count: int, presence_only: bool,
) -> Optional[np.ndarray]:
    """Kernel-backed per-sample qualifying counts, or None if no kernel fits."""
    s, eps, tf = query.subset_size, query.max_exceedance, query.type_filter
    if d == 2 and s == 2:
        if presence_only:
            tcode = -1 if tf is None else int(tf)
            return kern.pair_presence(n, seed, m0, m_count, eps, tcode).astype(np.int64)
        stats = kern.pair_stats(n, seed, m0, m_count)
        return _counts_from_stats(stats, query)
    if d == 2 and s == 3 and tf is None:
        return kern.triple_counts(n, seed, m0, m_count, eps, presence_only)
    if d >= 3 and s == 2 and tf is None:
        return kern.dary_pair_counts(n, d, seed, m0, m_count, eps, presence_only)
    return None


def _counts_from_stats(stats: np.ndarray, query: SubsetQuery) -> np.ndarray:
    """Qualifying-pair counts per sample from a pair_stats array."""
    if query.type_filter is not None:
        return stats[:, int(query.type_filter)].astype(np.int64)
    hi = min(2 + query.max_exceedance, 4)
    if hi < 1:
        return np.zeros(stats.shape[0], dtype=np.int64)
    return stats[:, 8 : 8 + hi].sum(axis=1).astype(np.int64)


def sample_indicator(
    n: int,
    query: SubsetQuery,
    key: SamplerKey,
    d: int = 2,
    eager: bool = False,
    backend: Optional[str] = None,
) -> bool:
    """Whether the sampled table contains a qualifying subset.

    The default path scans lazily with early exit; eager=True materializes
    the whole table and runs the core census. Both must agree.
    """
    if query.subset_size > n:
        raise ValueError(f"subset size {query.subset_size} exceeds order {n}")
    if eager:
        return _eager_indicator(n, query, key, d)
    kern = get_backend(backend)
    counts = _dispatch_counts(
        kern, n, d, query, key.seed, key.sample_index, 1, presence_only=True
    )
    if counts is None:
        return _eager_indicator(n, query, key, d)
    return bool(counts[0] > 0)


def mc_probability(
    n: int,
    query: SubsetQuery,
    samples: int,
    seed: int,
    d: int = 2,
    threads: Optional[int] = None,
    backend: Optional[str] = None,
) -> EstimateRecord:
    """Monte Carlo estimate of P(some qualifying subset) at order n."""
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if query.subset_size > n:
        raise ValueError(f"subset size {query.subset_size} exceeds order {n}")
    set_thread_count(threads)
    kern = get_backend(backend)
    counts = _dispatch_counts(kern, n, d, query, seed, 0, samples, presence_only=True)
    if counts is None:
        hits = sum(
            _eager_indicator(n, query, SamplerKey(seed, m), d) for m in range(samples)
        )
    else:
        hits = int((counts > 0).sum())
    return EstimateRecord(
        n=n, d=d, s=query.subset_size, eps=query.max_exceedance,
        type_filter=query.type_filter, samples=samples, seed=seed, hits=hits,
    )


def pair_statistics(
    n: int,
    samples: int,
    seed: int,
    threads: Optional[int] = None,
    backend: Optional[str] = None,
) -> np.ndarray:
    """Per-sample pair census at arity 2, shape (samples, 12).

    Columns 0..7 count deficient pairs of type T0..T7; columns 8..11 count
    pairs whose block has exactly 1, 2, 3, 4 distinct values. One pass
    here feeds per-type presence, the count histogram and the
    independence check.
    """
    set_thread_count(threads)
    return get_backend(backend).pair_stats(n, seed, 0, samples)


def per_type_presence(
    n: int,
    samples: int,
    seed: int,
    include_t0: bool = False,
    stats: Optional[np.ndarray] = None,
    threads: Optional[int] = None,
    backend: Optional[str] = None,
) -> list[EstimateRecord]:
    """Presence estimates P(some type-t pair), one record per type."""
    if stats is None:
        stats = pair_statistics(n, samples, seed, threads=threads, backend=backend)
    types = range(0, 8) if include_t0 else range(1, 8)
    return [
        EstimateRecord(
            n=n, d=2, s=2, eps=0, type_filter=PairType(t), samples=samples,
            seed=seed, hits=int((stats[:, t] > 0).sum()),
        )
        for t in types
    ]


@dataclass(frozen=True)
class CountHistogram:
    """Distribution of the number of T1..T7 deficient pairs per sample."""

    n: int
    samples: int
    seed: int
    counts: tuple[int, ...]
    lambda_n: Fraction
    tv_poisson: float
    mean: float

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "counts": list(self.counts),
            "lambda_n": str(self.lambda_n),
            "tv_poisson": self.tv_poisson,
            "mean": self.mean,
        }


def typed_pair_rate(n: int) -> Fraction:
    """Expected number of T1..T7 pairs: C(n,2) * 7(n-1) / n^3 (T0 excluded)."""
    return Fraction(binomial(n, 2) * 7 * (n - 1), n**3)


def _poisson_tv(counts: np.ndarray, samples: int, lam: float) -> float:
    """Total variation distance between the empirical histogram and Poisson(lam)."""
    pmf = math.exp(-lam)
    tv = 0.0
    tail = 1.0
    for m in range(counts.size):
        emp = counts[m] / samples
        tv += abs(emp - pmf)
        tail -= pmf
        pmf *= lam / (m + 1)
    return 0.5 * (tv + max(tail, 0.0))


def count_distribution(
    n: int,
    samples: int,
    seed: int,
    stats: Optional[np.ndarray] = None,
    threads: Optional[int] = None,
    backend: Optional[str] = None,
) -> CountHistogram:
    """Histogram of typed-pair counts with its distance to Poisson(lambda_n)."""
    if stats is None:
        stats = pair_statistics(n, samples, seed, threads=threads, backend=backend)
    per_sample = stats[:, 1:8].sum(axis=1)
    counts = np.bincount(per_sample)
    lam = typed_pair_rate(n)
    return CountHistogram(
        n=n,
        samples=samples,
        seed=seed,
        counts=tuple(int(c) for c in counts),
        lambda_n=lam,
        tv_poisson=_poisson_tv(counts, samples, float(lam)),
        mean=float(per_sample.mean()),
    )


def independence_check(
    n: int,
    samples: int,
    seed: int,
    stats: Optional[np.ndarray] = None,
    threads: Optional[int] = None,
    backend: Optional[str] = None,
) -> np.ndarray:
    """Pearson correlations between the presence indicators of T1..T7.

    Degenerate indicators (zero variance) get correlation 0 off the
    diagonal; the diagonal is fixed at 1.
    """
    if stats is None:
        stats = pair_statistics(n, samples, seed, threads=threads, backend=backend)
    x = (stats[:, 1:8] > 0).astype(np.float64)
    xc = x - x.mean(axis=0)
    cov = xc.T @ xc / stats.shape[0]
    sd = np.sqrt(np.diag(cov))
    denom = np.outer(sd, sd)
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.where(denom > 0, cov / denom, 0.0)
    np.fill_diagonal(rho, 1.0)
    return rho


@dataclass(frozen=True)
class SweepRow:
    """One sweep entry: the estimate plus its theory columns."""

    record: EstimateRecord
    lambda_n: Fraction
    poisson_approx: float
    limit: float

    def to_json_dict(self) -> dict:
        out = self.record.to_json_dict()
        out["lambda_n"] = str(self.lambda_n)
        out["poisson_approx"] = self.poisson_approx
        out["limit"] = self.limit
        return out


def sweep(
    n_list: Sequence[int],
    query: SubsetQuery,
    samples: int,
    seed: int,
    d: int = 2,
    threads: Optional[int] = None,
    backend: Optional[str] = None,
) -> list[SweepRow]:
    """mc_probability over a list of orders, with lambda_n and limit columns."""
    if query.type_filter is not None:
        raise ValueError("sweeps are exceedance queries; drop the type filter")
    rate_inf = limit_rate(d, query.subset_size, query.max_exceedance)
    limit = 1.0 if rate_inf is None else limit_probability(rate_inf)
    rows = []
    for n in n_list:
        rec = mc_probability(
            n, query, samples, seed, d=d, threads=threads, backend=backend
        )
        lam = expected_count(n, d, query.subset_size, query.max_exceedance)
        rows.append(
            SweepRow(
                record=rec,
                lambda_n=lam,
                poisson_approx=limit_probability(lam),
                limit=limit,
            )
        )
    return rows


@dataclass(frozen=True)
class ExactResult:
    """Exhaustive census over every table of the given order."""

    n: int
    d: int
    s: int
    eps: int
    type_filter: Optional[PairType]
    tables: int
    hit_tables: int
    total_hits: int

    @property
    def probability(self) -> Fraction:
        return Fraction(self.hit_tables, self.tables)

    @property
    def mean_count(self) -> Fraction:
        return Fraction(self.total_hits, self.tables)

    def to_json_dict(self) -> dict:
        out = {
            "n": self.n,
            "d": self.d,
            "s": self.s,
            "eps": self.eps,
            "tables": self.tables,
            "hit_tables": self.hit_tables,
            "total_hits": self.total_hits,
            "probability": str(self.probability),
            "probability_real": float(self.probability),
            "mean_count": str(self.mean_count),
            "mean_count_real": float(self.mean_count),
        }
        if self.type_filter is not None:
            out["type"] = self.type_filter.name
        return out


def _exact_generic(n: int, d: int, query: SubsetQuery) -> tuple[int, int]:
    """Plain-python exhaustive census for tiny spaces of any arity."""
    n_cells = n**d
    hit_tables = 0
    total_hits = 0
    for cells in product(range(n), repeat=n_cells):
        table = OperationTable(order=n, arity=d, entries=np.array(cells, dtype=np.int64))
        found = len(deficient_subsets(table, query))
        if found:
            hit_tables += 1
        total_hits += found
    return hit_tables, total_hits


def exact_probability(
    n: int,
    query: SubsetQuery,
    d: int = 2,
    force: bool = False,
    threads: Optional[int] = None,
    backend: Optional[str] = None,
) -> ExactResult:
    """Exact P(some qualifying subset) and mean count over all n^(n^d) tables.

    Guarded: the space must stay below 2^32 tables unless force is given,
    and below 2^33 regardless (which admits exactly the n=4, d=2 census).
    """
    if query.subset_size > n:
        raise ValueError(f"subset size {query.subset_size} exceeds order {n}")
    tables = n ** (n**d)
    if tables >= EXHAUSTIVE_CEILING:
        raise ValueError(
            f"{n}^({n}^{d}) = {tables} tables is beyond exhaustive reach"
        )
    if tables >= EXHAUSTIVE_GUARD and not force:
        raise ValueError(
            f"{n}^({n}^{d}) = {tables} tables needs force=True (expect a long run)"
        )
    set_thread_count(threads)
    kern = get_backend(backend)
    s, eps, tf = query.subset_size, query.max_exceedance, query.type_filter
    if d == 2 and s == 2:
        hit_tables = total_hits = 0
        tcode = -1 if tf is None else int(tf)
        for t0 in range(0, tables, _EXHAUSTIVE_CHUNK):
            h, t = kern.exhaustive_pairs(
                n, eps, tcode, t0, min(_EXHAUSTIVE_CHUNK, tables - t0)
            )
            hit_tables += int(h)
            total_hits += int(t)
    elif d == 2 and s == 3 and tf is None:
        hit_tables = total_hits = 0
        for t0 in range(0, tables, _EXHAUSTIVE_CHUNK):
            h, t = kern.exhaustive_triples(
                n, eps, t0, min(_EXHAUSTIVE_CHUNK, tables - t0)
            )
            hit_tables += int(h)
            total_hits += int(t)
    elif tables <= 1 << 20:
        hit_tables, total_hits = _exact_generic(n, d, query)
    else:
        raise ValueError(
            f"no exhaustive kernel for d={d}, s={s} at this size"
        )
    return ExactResult(
        n=n, d=d, s=s, eps=eps, type_filter=tf,
        tables=tables, hit_tables=hit_tables, total_hits=total_hits,
    )
