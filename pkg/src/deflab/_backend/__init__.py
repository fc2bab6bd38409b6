"""Backend selection for the sampling/enumeration kernels.

Two interchangeable implementations exist: numba-compiled loops and a
pure-numpy fallback. DEFLAB_BACKEND picks one ("numba", "numpy", or the
default "auto" = numba when importable). Both produce bit-identical
results; the benchmark script compares their speed.
"""
from __future__ import annotations

import os
from types import ModuleType
from typing import Optional

BACKEND_ENV = "DEFLAB_BACKEND"
THREADS_ENV = "DEFLAB_THREADS"

_cache: dict[str, ModuleType] = {}


def _load_numba_kernels() -> ModuleType:
    if "numba" not in _cache:
        from . import kernels_numba

        _cache["numba"] = kernels_numba
    return _cache["numba"]


def _load_numpy_kernels() -> ModuleType:
    if "numpy" not in _cache:
        from . import kernels_numpy

        _cache["numpy"] = kernels_numpy
    return _cache["numpy"]


def get_backend(name: Optional[str] = None) -> ModuleType:
    """Resolve a kernel module by name, env var, or auto-detection."""
    name = (name or os.environ.get(BACKEND_ENV, "auto")).lower()
    if name == "numpy":
        return _load_numpy_kernels()
    if name == "numba":
        return _load_numba_kernels()
    if name == "auto":
        try:
            return _load_numba_kernels()
        except ImportError:
            return _load_numpy_kernels()
    raise ValueError(f"unknown backend {name!r}, expected numba, numpy or auto")


def backend_name(module: ModuleType) -> str:
    return module.__name__.rsplit("_", 1)[-1]


def set_thread_count(threads: Optional[int]) -> None:
    """Pin the numba thread pool; the numpy path is single-threaded anyway.

    Results never depend on this: kernels write per-sample slots and
    reduce with integer sums.
    """
    if threads is None:
        return
    if threads < 1:
        raise ValueError(f"thread count must be >= 1, got {threads}")
    try:
        import numba
    except ImportError:
        return
    numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))
