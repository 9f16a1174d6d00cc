"""Ordered parallel map honoring the ``XLINK_THREADS`` cap (0 or unset means one worker per CPU)."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    raw = os.environ.get("XLINK_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"XLINK_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"XLINK_THREADS must be non-negative, got {n}")
    return n or (os.cpu_count() or 1)


def pmap(fn, items) -> list:
    """``[fn(x) for x in items]`` evaluated concurrently; output order follows input order."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
