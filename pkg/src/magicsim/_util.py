"""Deterministic RNG streams, compensated summation, and worker pools.

Monte Carlo results must be byte-identical for a given seed no matter how many
worker processes run the sampling loop.  Three conventions enforce that:

* every sample owns an RNG stream keyed by (master seed, sample index),
* samples are grouped into fixed-size chunks regardless of worker count,
* partial results are reduced in chunk order with compensated summation.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from typing import Callable, Sequence

import numpy as np

# Chunk size is part of the reproducibility contract: changing it reorders the
# compensated reduction and may flip low bits of reported means.
CHUNK = 256

_MASK64 = (1 << 64) - 1


def sample_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent generator for one Monte Carlo sample.

    Philox is counter-based, so keying it directly with (seed, index) gives
    non-overlapping streams at a fraction of the cost of seed-sequence hashing.
    That matters: the dyadic estimator creates millions of these.
    """
    key = np.array([master_seed & _MASK64, index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def kahan_sum(values: Sequence[float]) -> float:
    """Compensated sum; order-sensitive by design, so callers fix the order."""
    total = 0.0
    comp = 0.0
    for x in values:
        y = float(x) - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def resolve_workers(workers: int | None) -> int:
    if workers is not None and workers > 0:
        return workers
    env = os.environ.get("MAGICSIM_WORKERS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def run_chunked(
    worker: Callable,
    payload,
    n_samples: int,
    workers: int | None = None,
    chunk: int = CHUNK,
) -> list:
    """Evaluate worker(payload, lo, hi) over fixed chunks, results in chunk order.

    The chunk grid depends only on n_samples, so single-process and pooled runs
    produce identical result lists.  payload must be picklable when workers > 1.
    """
    spans = [(lo, min(lo + chunk, n_samples)) for lo in range(0, n_samples, chunk)]
    nproc = resolve_workers(workers)
    if nproc <= 1 or len(spans) <= 1:
        return [worker(payload, lo, hi) for lo, hi in spans]
    los = [s[0] for s in spans]
    his = [s[1] for s in spans]
    with ProcessPoolExecutor(max_workers=nproc) as pool:
        return list(pool.map(worker, repeat(payload), los, his, chunksize=4))
