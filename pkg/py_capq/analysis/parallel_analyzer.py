import logging
import multiprocessing
from typing import Any, Callable, List, Sequence

import numpy as np

logger = logging.getLogger(__name__)


def partition_sizes(n_total: int, partitions: int) -> List[int]:
    """Split n_total draws into at most `partitions` chunks; earlier chunks get the remainder."""
    if n_total < 1:
        return []
    parts = min(partitions, n_total)
    return [len(chunk) for chunk in np.array_split(np.arange(n_total), parts)]


def child_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for partition (or replicate) `index`, derived from the master seed only."""
    return np.random.default_rng([seed, index])


def run_partitioned(worker: Callable[..., Any], tasks: Sequence[tuple], workers: int = 1) -> List[Any]:
    """
    Runs worker(*task) for every task, in order, on a process pool when
    workers > 1. The worker must be a module-level function so that it can be
    pickled.
    """
    if workers <= 1 or len(tasks) <= 1:
        return [worker(*task) for task in tasks]
    n_procs = min(workers, len(tasks))
    logger.debug("running %d partitions on %d processes", len(tasks), n_procs)
    with multiprocessing.Pool(processes=n_procs) as pool:
        return pool.starmap(worker, tasks)


def _draw_chunk(model, size: int, seed: int, index: int) -> np.ndarray:
    return model.draw(size, child_rng(seed, index))


def draw_partitioned(model, n_total: int, seed: int, partitions: int = 16, workers: int = 1) -> np.ndarray:
    """
    Draws n_total samples from `model` in fixed partitions and stitches them
    back together. The result depends on (model, n_total, seed, partitions)
    but not on the number of workers.
    """
    sizes = partition_sizes(n_total, partitions)
    tasks = [(model, size, seed, index) for index, size in enumerate(sizes)]
    chunks = run_partitioned(_draw_chunk, tasks, workers)
    return np.concatenate(chunks, axis=0)
