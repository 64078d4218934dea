"""Persistent embedding layout store"""
import json
import logging
from typing import Optional
from sqlalchemy import select, func
from sqlalchemy.ext.asyncio import AsyncSession

from src.embedding.banding import CouplerBudget, EmbeddingLayout
from src.embedding.cache import EmbeddingCache, embedding_cache
from src.embedding.database import EmbeddingRecord, utc_now

logger = logging.getLogger(__name__)


def record_id(n: int, k: int, c_limit: int) -> str:
    return f"N{n}-K{k}-C{c_limit}"


class EmbeddingStore:
    """Layouts persisted in SQL, fronted by the in-memory cache"""

    def __init__(self, cache: Optional[EmbeddingCache] = None):
        self.cache = cache if cache is not None else embedding_cache

    async def get(self, session: AsyncSession, n: int, k: int, c_limit: int) -> Optional[EmbeddingLayout]:
        """Stored layout, or None"""
        record = await session.get(EmbeddingRecord, record_id(n, k, c_limit))
        if not record:
            return None

        record.hits += 1
        await session.commit()
        logger.info(f"Embedding store hit for N={n} K={k} C_limit={c_limit}")
        return EmbeddingLayout.from_dict(json.loads(record.layout))

    async def put(self, session: AsyncSession, layout: EmbeddingLayout, c_limit: int) -> EmbeddingRecord:
        """Insert a layout unless its shape is already stored"""
        key = record_id(layout.n, layout.k, c_limit)
        existing = await session.get(EmbeddingRecord, key)
        if existing:
            return existing

        record = EmbeddingRecord(
            id=key,
            n=layout.n,
            k=layout.k,
            c_limit=c_limit,
            kappa=layout.kappa,
            coupler_count=layout.coupler_count,
            layout=json.dumps(layout.to_dict()),
            created_at=utc_now(),
        )
        session.add(record)
        await session.commit()
        await session.refresh(record)

        logger.info(f"Stored embedding {key}: kappa={layout.kappa}, {layout.coupler_count} couplers")
        return record

    async def get_or_build(
        self,
        session: AsyncSession,
        n: int,
        k: int,
        budget: CouplerBudget,
    ) -> tuple[EmbeddingLayout, bool]:
        """
        Layout for (N, K) under the budget.

        Returns the layout and whether it came from the store. A store hit
        also warms the in-memory cache.
        """
        layout = await self.get(session, n, k, budget.c_limit)
        if layout is not None:
            return self.cache.put(layout, budget.c_limit), True

        layout = self.cache.get_or_build(n, k, budget)
        await self.put(session, layout, budget.c_limit)
        return layout, False

    async def count(self, session: AsyncSession) -> int:
        """Number of stored layouts"""
        result = await session.execute(select(func.count(EmbeddingRecord.id)))
        return result.scalar() or 0

    async def delete(self, session: AsyncSession, n: int, k: int, c_limit: int) -> bool:
        record = await session.get(EmbeddingRecord, record_id(n, k, c_limit))
        if not record:
            return False

        await session.delete(record)
        await session.commit()
        logger.info(f"Deleted embedding {record.id}")
        return True


# Global store instance
embedding_store = EmbeddingStore()
