"""Fixed-partition path batches, optionally spread over worker processes.

The batch partition depends only on ``n_paths`` and ``batch_size``; batch b
always draws from ``rng.derive(b)`` and summaries are merged in batch order.
The merged result is therefore identical for any worker count.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import partial
from multiprocessing import Pool
from typing import Callable

import numpy as np

from src.sampling.estimate import MCEstimate, merge_all
from src.sampling.rng import RngStream
from src.utils.errors import DomainError, NumericError
from src.utils.telemetry import traced

logger = logging.getLogger(__name__)

DEFAULT_BATCH_SIZE = 8192

Kernel = Callable[[np.random.Generator, int], np.ndarray]


@dataclass(frozen=True)
class BatchResult:
    columns: tuple[MCEstimate, ...]
    monotone_violations: int
    n_batches: int

    @property
    def estimate(self) -> MCEstimate:
        return self.columns[0]


def batch_sizes(n_paths: int, batch_size: int) -> list[int]:
    if n_paths < 1:
        raise DomainError("n_paths must be >= 1")
    if batch_size < 1:
        raise DomainError("batch_size must be >= 1")
    full, rest = divmod(n_paths, batch_size)
    return [batch_size] * full + ([rest] if rest else [])


def _run_batch(kernel: Kernel, rng: RngStream, monotone_width: int, job: tuple[int, int]):
    batch_id, size = job
    stream = rng.derive(batch_id)
    values = np.asarray(kernel(stream.generator(), size), dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if values.shape[0] != size:
        raise NumericError("kernel returned the wrong number of paths", batch=batch_id, expected=size, got=values.shape[0])
    if not np.all(np.isfinite(values)):
        bad = int(np.count_nonzero(~np.isfinite(values)))
        raise NumericError("non-finite path weights", batch=batch_id, count=bad)
    violations = 0
    if monotone_width > 1:
        block = values[:, :monotone_width]
        violations = int(np.count_nonzero(np.diff(block, axis=1) < 0))
    seed = stream.describe()
    return [MCEstimate.from_samples(values[:, j], seed) for j in range(values.shape[1])], violations


def run_batches(
    kernel: Kernel,
    n_paths: int,
    rng: RngStream,
    *,
    batch_size: int = DEFAULT_BATCH_SIZE,
    workers: int = 1,
    monotone_width: int = 0,
    label: str = "batches",
) -> BatchResult:
    """Evaluate ``kernel`` over ``n_paths`` paths and merge per-column estimates.

    ``kernel(generator, n)`` returns an (n,) or (n, K) array of path weights.
    When ``monotone_width`` is set, the first that many columns must be
    nondecreasing along each row; offending entries are counted.
    """
    sizes = batch_sizes(n_paths, batch_size)
    jobs = list(enumerate(sizes))
    task = partial(_run_batch, kernel, rng, monotone_width)
    with traced(label, n_paths=n_paths, n_batches=len(jobs), workers=workers, seed=rng.seed, stream_id=rng.stream_id):
        if workers > 1 and len(jobs) > 1:
            with Pool(processes=min(workers, len(jobs))) as pool:
                results = pool.map(task, jobs)
        else:
            results = [task(job) for job in jobs]
    n_columns = len(results[0][0])
    columns = []
    for j in range(n_columns):
        merged = merge_all(batch[0][j] for batch in results)
        columns.append(MCEstimate(merged.mean, merged.std_err, merged.n, merged.m2, rng.describe()))
    violations = sum(batch[1] for batch in results)
    logger.debug("%s: %d paths in %d batches, first column %.6g +- %.2g", label, n_paths, len(jobs), columns[0].mean, columns[0].std_err)
    return BatchResult(columns=tuple(columns), monotone_violations=violations, n_batches=len(jobs))
