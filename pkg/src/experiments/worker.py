"""Process pool for independent seeded trials"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

from src.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class TrialPool:
    """
    Runs trial functions serially or across worker processes.

    Results come back in task order, so the worker count never changes
    what a protocol emits. Trial functions and their arguments must be
    picklable when workers > 1.
    """

    def __init__(self, workers: Optional[int] = None):
        self.workers = settings.workers if workers is None else workers
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")

    def map(self, fn: Callable[[T], R], tasks: Iterable[T]) -> list[R]:
        items = list(tasks)
        started = time.monotonic()
        logger.info(f"Running {len(items)} trials on {self.workers} worker(s)")

        try:
            if self.workers == 1 or len(items) < 2:
                results = [fn(item) for item in items]
            else:
                with ProcessPoolExecutor(max_workers=min(self.workers, len(items))) as pool:
                    results = list(pool.map(fn, items))
        except Exception as e:
            logger.error(f"Trial failed: {e}", exc_info=True)
            raise

        logger.info(f"Finished {len(items)} trials in {time.monotonic() - started:.1f}s")
        return results
