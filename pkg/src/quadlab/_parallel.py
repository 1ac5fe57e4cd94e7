"""Block-parallel maps with a thread-count-independent reduction.

Work is cut into blocks whose boundaries depend only on the input, never on
the number of threads, and results are reassembled in block order.  Final
sums go through ``math.fsum`` (correctly rounded), so totals are bit-stable
for any thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

DEFAULT_BLOCK = 4096


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get("QDL_THREADS", "1"))
    return max(1, int(threads))


def map_blocks(
    func: Callable[[np.ndarray], np.ndarray],
    items: np.ndarray,
    block: int = DEFAULT_BLOCK,
    threads: int | None = None,
) -> np.ndarray:
    """Apply ``func`` to fixed-size slices of ``items``; concatenate in order."""
    items = np.asarray(items)
    if items.size == 0:
        return func(items)
    chunks = [items[i : i + block] for i in range(0, len(items), block)]
    nthreads = resolve_threads(threads)
    if nthreads == 1 or len(chunks) == 1:
        parts = [func(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            parts = list(pool.map(func, chunks))
    return np.concatenate(parts)


def exact_sum(values: Sequence[float] | np.ndarray) -> float:
    return math.fsum(np.asarray(values, dtype=np.float64).ravel())
