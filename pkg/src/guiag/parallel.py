"""Parallel execution helpers."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING

if TYPE_CHECKING:
  from collections.abc import Callable, Sequence


class ParallelWorkerManager:
  """Runs independent units of work (trajectories, episodes) on a thread pool."""

  @staticmethod
  def execute_parallel_work[T, R](
    worker_func: Callable[[T], R],
    worker_args: Sequence[T],
    max_workers: int | None = None,
  ) -> list[R]:
    """Apply ``worker_func`` to every argument and return results in input order.

    Results keep the order of ``worker_args`` no matter which worker finishes first, so any output
    built from them is identical across runs and worker counts.
    """
    if not worker_args:
      return []

    if len(worker_args) == 1 or max_workers == 1:
      return [worker_func(args) for args in worker_args]

    actual_workers = min(len(worker_args), max_workers or len(worker_args))
    with ThreadPoolExecutor(max_workers=actual_workers) as executor:
      return list(executor.map(worker_func, worker_args))
