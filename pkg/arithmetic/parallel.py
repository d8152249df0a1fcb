"""
Chunked worker pool for the enumeration searches.

Work is cut into contiguous chunks; each chunk is handled by a picklable
top-level function. Results come back in chunk order regardless of which
worker finished first, so callers reduce them deterministically.
"""

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed

logger = logging.getLogger(__name__)


def chunk_ranges(total, chunks):
    """Split range(total) into at most `chunks` contiguous (start, end) pairs."""
    chunks = max(1, min(chunks, total)) if total else 1
    size, extra = divmod(total, chunks)
    ranges = []
    start = 0
    for i in range(chunks):
        end = start + size + (1 if i < extra else 0)
        ranges.append((start, end))
        start = end
    return ranges


def run_chunked(func, items, workers=1, args=(), chunks_per_worker=4):
    """
    Apply func(chunk, *args) to consecutive chunks of items.

    Returns the list of per-chunk results in input order.
    """
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [func(items, *args)]

    ranges = chunk_ranges(len(items), workers * chunks_per_worker)
    results = [None] * len(ranges)
    logger.debug(f"Dispatching {len(items)} items in {len(ranges)} chunks to {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = {
            executor.submit(func, items[start:end], *args): index
            for index, (start, end) in enumerate(ranges)
        }
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return results
