"""Order-preserving parallel map sized by the EPWLAB_THREADS environment variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

__all__ = ["thread_count", "parallel_map"]


def thread_count() -> int:
    raw = os.environ.get("EPWLAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"EPWLAB_THREADS must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise ValueError(f"EPWLAB_THREADS must be a positive integer, got {raw!r}")
    return n


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """fn over items, results in input order whatever the thread count."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
