"""Deterministic chunked parallelism.

Worker pools are plain threads: the hot kernels release the GIL (numba
nogil or large numpy ops), so threads scale while keeping shared memory.
Every reduction here consumes per-chunk results in chunk-index order, so
thread count never changes a result, only wall time.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar, Union

from .errors import UsageError

T = TypeVar("T")

DEFAULT_CHUNK = 1 << 16


def thread_count(requested: Union[int, str, None] = None) -> int:
    """Resolve a worker count: explicit value, HVLAB_THREADS, cpu count."""
    if requested in (None, "auto", ""):
        requested = os.environ.get("HVLAB_THREADS", "").strip() or None
    if requested in (None, "auto", ""):
        return max(1, os.cpu_count() or 1)
    try:
        n = int(requested)
    except (TypeError, ValueError):
        raise UsageError(f"thread count must be an integer or 'auto', got {requested!r}")
    if n < 1:
        raise UsageError(f"thread count must be positive, got {n}")
    return n


def chunk_spans(n: int, chunk: int = DEFAULT_CHUNK) -> List[Tuple[int, int]]:
    return [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]


def map_chunks(
    fn: Callable[[int, int], T],
    n: int,
    threads: Union[int, str, None] = None,
    chunk: int = DEFAULT_CHUNK,
) -> List[T]:
    """fn(lo, hi) over [0, n) in chunks; results in chunk order."""
    spans = chunk_spans(n, chunk)
    workers = min(thread_count(threads), len(spans)) if spans else 1
    if workers <= 1:
        return [fn(lo, hi) for lo, hi in spans]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda span: fn(*span), spans))


def map_items(
    fn: Callable[[int], T],
    n: int,
    threads: Union[int, str, None] = None,
) -> List[T]:
    """fn(i) for i in range(n); results in index order."""
    workers = min(thread_count(threads), n) if n else 1
    if workers <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n)))
