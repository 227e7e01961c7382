"""
Thread-pool helpers for independent numerical work items.

numpy and scipy release the GIL inside their kernels, so a thread pool is
enough for the per-point and per-replicate loops. Results always come back
in input order.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from tvglasso.core.config import settings

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: Optional[int] = None) -> int:
    """Worker count: explicit value, else settings.THREADS, never below one"""
    return max(1, settings.THREADS if threads is None else int(threads))


def ordered_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Apply ``func`` to every item, preserving input order.

    Args:
        func: Pure function of one item
        items: Work items
        threads: Worker cap (defaults to settings.THREADS)

    Returns:
        Results in input order
    """
    work = list(items)
    workers = min(resolve_threads(threads), max(len(work), 1))
    if workers == 1:
        return [func(item) for item in work]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, work))
