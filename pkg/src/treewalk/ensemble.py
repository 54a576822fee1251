"""Seeded ensembles: reproducible streams, parallel maps, stable aggregation.

Every realization draws from a generator keyed by ``(master seed, stream
key, realization index)``, so results are independent of execution order
and worker count.  Aggregation always reduces in realization order, which
keeps output bytes identical whether a sweep ran serially or on a pool.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = ["realization_rng", "resolve_workers", "run_ordered", "mean_std", "stderr"]


def realization_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for one realization, keyed by the master seed and index path."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def resolve_workers(workers: int | None) -> int:
    if workers is None or workers <= 0:
        return os.cpu_count() or 1
    return workers


def run_ordered(task: Callable, args: Sequence, workers: int | None = 1) -> list:
    """Run ``task`` over ``args`` and return results in input order.

    ``workers=1`` runs serially; otherwise a process pool is used.  The
    result list order (and therefore every downstream reduction) does not
    depend on completion order.
    """
    n_workers = resolve_workers(workers)
    if n_workers == 1 or len(args) <= 1:
        return [task(a) for a in args]
    chunk = max(1, len(args) // (4 * n_workers))
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(task, args, chunksize=chunk))


def mean_std(samples: Iterable[np.ndarray]) -> tuple[np.ndarray, np.ndarray, int]:
    """Mean and (population) standard deviation over stacked realizations."""
    stack = np.stack(list(samples))
    return stack.mean(axis=0), stack.std(axis=0), stack.shape[0]


def stderr(std: np.ndarray, count: int) -> np.ndarray:
    return std / np.sqrt(max(count, 1))
