"""Order-preserving parallel map; worker count from STARVAL_THREADS (0 = auto)."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    raw = os.environ.get("STARVAL_THREADS", "1").strip() or "1"
    try:
        k = int(raw)
    except ValueError:
        return 1
    if k <= 0:
        return os.cpu_count() or 1
    return k


def parallel_map(fn, items):
    """list(map(fn, items)), possibly threaded; results keep input order so
    downstream reductions stay deterministic."""
    items = list(items)
    k = min(worker_count(), len(items))
    if k <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, items))
