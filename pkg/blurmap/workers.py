"""Worker pool shared by the pipeline stages."""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Callable, Iterable, List, Optional, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# Global worker pool
_pool: Optional[ThreadPoolExecutor] = None
_size: int = 1


def resolve_threads(threads: int) -> int:
    """0 means one worker per CPU."""
    if threads and threads > 0:
        return threads
    return os.cpu_count() or 1


def init_pool(threads: int = 0) -> ThreadPoolExecutor:
    """Creates the global worker pool."""
    global _pool, _size

    if _pool is not None:
        close_pool()

    _size = resolve_threads(threads)
    logger.info(f"Initializing worker pool with {_size} threads")
    _pool = ThreadPoolExecutor(max_workers=_size, thread_name_prefix="blurmap")
    return _pool


def close_pool():
    """Shuts the global worker pool down."""
    global _pool, _size
    if _pool:
        _pool.shutdown(wait=True)
        _pool = None
        _size = 1
        logger.info("Worker pool closed")


def get_pool() -> ThreadPoolExecutor:
    """Returns the current worker pool."""
    if _pool is None:
        raise RuntimeError("Worker pool is not initialized. Call init_pool() first.")
    return _pool


def pool_size() -> int:
    return _size if _pool is not None else 1


@contextmanager
def worker_pool(threads: int = 0):
    """Context manager: pool open for the duration of the block."""
    pool = init_pool(threads)
    try:
        yield pool
    finally:
        close_pool()


def map_ordered(fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """Applies fn to every item, in the pool when there is one.

    Results come back in input order, so reductions over them are the same
    for any pool size.
    """
    items = list(items)
    if _pool is None or _size == 1 or len(items) < 2:
        return [fn(item) for item in items]
    return list(_pool.map(fn, items))
