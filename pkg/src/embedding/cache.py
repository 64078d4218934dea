"""In-memory cache of embedding layouts keyed by problem shape"""
import logging
import threading

from src.embedding.banding import CouplerBudget, EmbeddingLayout, build_layout, compute_kappa

logger = logging.getLogger(__name__)


class EmbeddingCache:
    """
    Layouts keyed by (N, K, C_limit).

    Lookups take no lock; insertion is serialized. Two threads may build the
    same layout concurrently, the first insert wins and both are identical.
    """

    def __init__(self):
        self._layouts: dict[tuple[int, int, int], EmbeddingLayout] = {}
        self._lock = threading.Lock()
        self.builds = 0

    def __len__(self) -> int:
        return len(self._layouts)

    def __contains__(self, key: tuple[int, int, int]) -> bool:
        return key in self._layouts

    def get(self, n: int, k: int, c_limit: int) -> EmbeddingLayout | None:
        return self._layouts.get((n, k, c_limit))

    def put(self, layout: EmbeddingLayout, c_limit: int) -> EmbeddingLayout:
        with self._lock:
            return self._layouts.setdefault((layout.n, layout.k, c_limit), layout)

    def get_or_build(self, n: int, k: int, budget: CouplerBudget) -> EmbeddingLayout:
        layout = self.get(n, k, budget.c_limit)
        if layout is not None:
            return layout

        kappa = compute_kappa(n, budget.c_limit, k)
        layout = build_layout(n, k, kappa + 1)
        with self._lock:
            self.builds += 1
        logger.info(
            f"Built embedding layout N={n} K={k}: kappa={kappa}, "
            f"{layout.coupler_count} of {budget.c_limit} couplers"
        )
        return self.put(layout, budget.c_limit)


def cache_get_or_build(cache: EmbeddingCache, n: int, k: int, budget: CouplerBudget) -> EmbeddingLayout:
    """Return the cached layout for (N, K), building it on first use"""
    return cache.get_or_build(n, k, budget)


# Process-wide cache
embedding_cache = EmbeddingCache()
