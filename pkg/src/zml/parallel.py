"""Order-preserving chunk mapping with an optional thread pool.

Chunk boundaries never depend on the thread count, so results are the same
bit for bit whether one or many threads run them.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

_threads = 1


def set_threads(n: int) -> None:
    """Set the worker count; 0 means one per CPU."""
    global _threads
    if n < 0:
        raise ValueError("thread count must be >= 0")
    _threads = n if n > 0 else (os.cpu_count() or 1)


def get_threads() -> int:
    return _threads


def map_ordered(func: Callable[[T], R], items: Iterable[T]) -> list[R]:
    items = list(items)
    if _threads <= 1 or len(items) <= 1:
        return [func(it) for it in items]
    with ThreadPoolExecutor(max_workers=_threads) as pool:
        return list(pool.map(func, items))
