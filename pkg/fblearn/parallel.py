"""Ordered parallel map on a thread pool.

numpy releases the GIL inside the heavy kernels (sorting, reductions), so
threads are enough for the scans in this package. Nested calls run serially
inside the worker that made them.

"""

import threading
from concurrent.futures import ThreadPoolExecutor

from .config import config


_local = threading.local()


def worker_count():
    """Number of worker threads; see ``FBLEARN_THREADS``."""
    return max(1, int(config.threads))


def _run(func, item):
    _local.active = True
    try:
        return func(item)
    finally:
        _local.active = False


def pmap(func, items):
    """Return ``[func(x) for x in items]``, computed on the worker pool."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1 or getattr(_local, 'active', False):
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda x: _run(func, x), items))
