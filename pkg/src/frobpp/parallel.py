"""Ordered fan-out over worker processes."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], jobs: Iterable[T], workers: int = 1) -> list[R]:
    """``[func(j) for j in jobs]``, possibly computed in parallel; order is preserved."""
    jobs = list(jobs)
    if workers <= 1 or len(jobs) <= 1:
        return [func(j) for j in jobs]
    with ProcessPoolExecutor(workers) as pool:
        return list(pool.map(func, jobs))


def chunked(lo: int, hi: int, parts: int, step: int = 1) -> list[tuple[int, int]]:
    """Split [lo, hi] into at most ``parts`` contiguous inclusive pieces."""
    if lo > hi:
        return []
    size = max(step, -(-(hi - lo + 1) // max(parts, 1)))
    size += (-size) % step
    return [(a, min(hi, a + size - 1)) for a in range(lo, hi + 1, size)]
