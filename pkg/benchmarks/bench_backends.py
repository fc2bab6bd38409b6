#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy twins.

The two backends produce bit-identical output (asserted on a small slice
before timing), so this is purely a speed comparison of the hot paths:
the counter-based pair census, the early-exit presence scan, the triple
bitset scan, the d-ary pair scan and the exhaustive census.

Usage: python benchmarks/bench_backends.py [--quick]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from deflab._backend import get_backend


def timed(fn, args) -> float:
    t0 = time.perf_counter()
    fn(*args)
    return time.perf_counter() - t0


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    numba_k = get_backend("numba")
    numpy_k = get_backend("numpy")
    print("compiling numba kernels (cached after first run)...", flush=True)
    numba_k.warmup()

    s = 1 if args.quick else 4
    # label, kernel, small args (equality check), bench args
    cases = [
        ("pair_stats       n=200", "pair_stats",
         (200, 0, 0, 10), (200, 0, 0, 500 * s)),
        ("pair_presence    n=200", "pair_presence",
         (200, 0, 0, 10, 0, -1), (200, 0, 0, 1000 * s, 0, -1)),
        ("triple_counts    n=80", "triple_counts",
         (80, 0, 0, 5, 0, True), (80, 0, 0, 100 * s, 0, True)),
        ("dary_pairs d=3   n=30", "dary_pair_counts",
         (30, 3, 0, 0, 20, 0, False), (30, 3, 0, 0, 2000 * s, 0, False)),
        ("exhaustive_pairs n=3", "exhaustive_pairs",
         (3, 0, -1, 0, 1000), (3, 0, -1, 0, 3**9)),
    ]

    print(f"\n{'kernel':26s} {'numba':>10s} {'numpy':>10s} {'speedup':>9s}")
    for label, fn_name, small, bench in cases:
        a = np.asarray(getattr(numba_k, fn_name)(*small))
        b = np.asarray(getattr(numpy_k, fn_name)(*small))
        assert np.array_equal(a, b), f"{fn_name}: backends differ"
        t_nb = timed(getattr(numba_k, fn_name), bench)
        t_np = timed(getattr(numpy_k, fn_name), bench)
        print(f"{label:26s} {t_nb:9.3f}s {t_np:9.3f}s {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
