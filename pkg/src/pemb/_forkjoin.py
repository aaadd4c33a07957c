"""Minimal fork-join layer.

Every parallel loop in the package goes through :func:`parallel_for`: the
index range is halved into contiguous chunks, each chunk is handed to a
numba kernel compiled with ``nogil=True``, and the call returns only once
all chunks are done (the join). Chunks never write overlapping index ranges,
so results do not depend on the thread count or on scheduling.
"""
from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numba import njit

ENV_THREADS = "PEMB_THREADS"
GRAIN = 4096

_pools: dict[int, ThreadPoolExecutor] = {}
_pools_lock = threading.Lock()


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit argument, else ``$PEMB_THREADS``, else the CPU count."""
    if threads is None:
        env = os.environ.get(ENV_THREADS, "").strip()
        threads = int(env) if env else (os.cpu_count() or 1)
    threads = int(threads)
    if threads < 1:
        raise ValueError(f"thread count must be >= 1, got {threads}")
    return threads


def _pool(threads: int) -> ThreadPoolExecutor:
    with _pools_lock:
        pool = _pools.get(threads)
        if pool is None:
            pool = ThreadPoolExecutor(max_workers=threads, thread_name_prefix="pemb")
            _pools[threads] = pool
        return pool


def split_range(n: int, threads: int, grain: int = GRAIN) -> list[tuple[int, int]]:
    if n <= 0:
        return []
    if threads == 1 or n <= grain:
        return [(0, n)]
    parts = min(max(1, n // grain), 4 * threads)
    bounds = [n * k // parts for k in range(parts + 1)]
    return [(bounds[k], bounds[k + 1]) for k in range(parts)]


def run_tasks(tasks, threads: int) -> list:
    """Run ``(fn, args)`` pairs, in parallel when ``threads > 1``; returns results in order."""
    if threads == 1 or len(tasks) <= 1:
        return [fn(*args) for fn, args in tasks]
    pool = _pool(threads)
    futures = [pool.submit(fn, *args) for fn, args in tasks]
    return [f.result() for f in futures]


def parallel_for(kernel, n: int, threads: int, *args, grain: int = GRAIN) -> list:
    """Call ``kernel(lo, hi, *args)`` over chunks of ``range(n)``."""
    return run_tasks([(kernel, (lo, hi) + args) for lo, hi in split_range(n, threads, grain)], threads)


@njit(cache=True, nogil=True)
def _chunk_sum(lo, hi, values):
    s = 0
    for i in range(lo, hi):
        s += values[i]
    return s


@njit(cache=True, nogil=True)
def _chunk_scan(lo, hi, values, out, offset, inclusive):
    s = offset
    if inclusive:
        for i in range(lo, hi):
            s += values[i]
            out[i] = s
    else:
        for i in range(lo, hi):
            out[i] = s
            s += values[i]
    return hi - lo


def prefix_sum(values, threads: int | None = 1, *, inclusive: bool = True) -> np.ndarray:
    """Blocked parallel scan: chunk sums, a sequential scan over chunk totals, then per-chunk fix-up."""
    values = np.ascontiguousarray(values)
    if values.dtype.kind not in "iub":
        raise TypeError("prefix_sum expects integer values")
    values = values.astype(np.int64, copy=False)
    threads = resolve_threads(threads)
    n = len(values)
    out = np.empty(n, dtype=np.int64)
    parts = split_range(n, threads)
    sums = run_tasks([(_chunk_sum, (lo, hi, values)) for lo, hi in parts], threads)
    offsets = np.zeros(len(parts), dtype=np.int64)
    if len(parts) > 1:
        offsets[1:] = np.cumsum(np.asarray(sums[:-1], dtype=np.int64))
    run_tasks(
        [(_chunk_scan, (lo, hi, values, out, int(off), inclusive)) for (lo, hi), off in zip(parts, offsets)],
        threads,
    )
    return out
