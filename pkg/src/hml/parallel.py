"""Ordered, thread-based map for independent parameter points."""
import os
from concurrent.futures import ThreadPoolExecutor


def max_workers(default=None):
    """Worker count from ``HML_THREADS`` (>= 1), else ``default`` or the CPU count."""
    env = os.environ.get("HML_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"HML_THREADS must be an integer, got {env!r}") from None
        return max(1, n)
    return default or (os.cpu_count() or 1)


def ordered_map(fn, items, workers=None):
    """``[fn(x) for x in items]``, evaluated concurrently; results keep input order."""
    items = list(items)
    workers = max_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
