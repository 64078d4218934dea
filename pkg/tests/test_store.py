"""Tests for the persistent embedding store"""
import asyncio

import pytest

from src.embedding.banding import CouplerBudget
from src.embedding.cache import EmbeddingCache
from src.embedding.database import create_engine_for, init_db, session_factory
from src.embedding.store import EmbeddingStore


def run_with_store(tmp_path, body):
    """Run body(store, session_maker) against a fresh SQLite file"""
    async def runner():
        engine = create_engine_for(f"sqlite+aiosqlite:///{tmp_path}/store/embeddings.db")
        try:
            await init_db(engine)
            return await body(EmbeddingStore(EmbeddingCache()), session_factory(engine))
        finally:
            await engine.dispose()
    return asyncio.run(runner())


class TestEmbeddingStore:
    @pytest.fixture
    def budget(self):
        return CouplerBudget(c_limit=11325)

    @pytest.mark.unit
    def test_build_then_hit(self, tmp_path, budget):
        async def body(store, Session):
            async with Session() as session:
                first, stored_first = await store.get_or_build(session, 150, 1, budget)
            async with Session() as session:
                second, stored_second = await store.get_or_build(session, 150, 1, budget)
                count = await store.count(session)
            return first, stored_first, second, stored_second, count

        first, stored_first, second, stored_second, count = run_with_store(tmp_path, body)
        assert not stored_first
        assert stored_second
        assert first.same_as(second)
        assert first.kappa == 149
        assert first.coupler_count == 11325
        assert count == 1

    @pytest.mark.unit
    def test_shapes_stored_separately(self, tmp_path, budget):
        async def body(store, Session):
            async with Session() as session:
                await store.get_or_build(session, 300, 1, budget)
                await store.get_or_build(session, 30, 2, budget)
                return await store.count(session)

        assert run_with_store(tmp_path, body) == 2

    @pytest.mark.unit
    def test_delete(self, tmp_path, budget):
        async def body(store, Session):
            async with Session() as session:
                layout, _ = await store.get_or_build(session, 12, 1, budget)
                removed = await store.delete(session, 12, 1, budget.c_limit)
                missing = await store.get(session, 12, 1, budget.c_limit)
                removed_again = await store.delete(session, 12, 1, budget.c_limit)
            return layout, removed, missing, removed_again

        layout, removed, missing, removed_again = run_with_store(tmp_path, body)
        assert layout.kappa == 11
        assert removed and not removed_again
        assert missing is None

    @pytest.mark.unit
    def test_store_hit_warms_cache(self, tmp_path, budget):
        async def body(store, Session):
            async with Session() as session:
                await store.get_or_build(session, 40, 1, budget)
            fresh = EmbeddingStore(EmbeddingCache())
            async with Session() as session:
                layout, stored = await fresh.get_or_build(session, 40, 1, budget)
            return fresh, stored

        fresh, stored = run_with_store(tmp_path, body)
        assert stored
        assert (40, 1, 11325) in fresh.cache
        assert fresh.cache.builds == 0
