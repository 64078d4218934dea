"""Database models for the persistent embedding store"""
from datetime import datetime, timezone
from pathlib import Path
from sqlalchemy import Column, String, Integer, DateTime, Text, Index
from sqlalchemy.engine import make_url
from sqlalchemy.ext.asyncio import create_async_engine, AsyncEngine, AsyncSession, async_sessionmaker
from sqlalchemy.orm import declarative_base
from sqlalchemy.pool import NullPool

from src.config import settings

Base = declarative_base()


def utc_now() -> datetime:
    """Get current UTC time as timezone-aware datetime"""
    return datetime.now(timezone.utc)


class EmbeddingRecord(Base):
    """Stored coupler layout for one (N, K, C_limit) shape"""
    __tablename__ = "embeddings"

    id = Column(String, primary_key=True)
    n = Column(Integer, nullable=False)
    k = Column(Integer, nullable=False)
    c_limit = Column(Integer, nullable=False)
    kappa = Column(Integer, nullable=False)
    coupler_count = Column(Integer, nullable=False)
    layout = Column(Text, nullable=False)  # JSON string
    created_at = Column(DateTime(timezone=True), nullable=False, default=utc_now)
    hits = Column(Integer, nullable=False, default=0)

    __table_args__ = (
        Index('ix_embeddings_shape', 'n', 'k', 'c_limit', unique=True),
    )


def create_engine_for(url: str) -> AsyncEngine:
    """
    Async engine for a database URL. SQLite connections are not pooled so
    one engine can serve several event loops (CLI runs, test clients).
    """
    sqlite = "sqlite" in url
    return create_async_engine(
        url,
        echo=settings.log_level == "DEBUG",
        connect_args={"check_same_thread": False} if sqlite else {},
        **({"poolclass": NullPool} if sqlite else {}),
    )


def session_factory(bind: AsyncEngine) -> async_sessionmaker:
    return async_sessionmaker(bind, class_=AsyncSession, expire_on_commit=False)


# Default engine and session maker from settings
engine = create_engine_for(settings.database_url)
AsyncSessionLocal = session_factory(engine)


async def init_db(bind: AsyncEngine = engine):
    """Create tables, and the SQLite file's directory if needed"""
    url = make_url(str(bind.url))
    if url.get_backend_name() == "sqlite" and url.database not in (None, "", ":memory:"):
        Path(url.database).parent.mkdir(parents=True, exist_ok=True)
    async with bind.begin() as conn:
        await conn.run_sync(Base.metadata.create_all)


async def get_session():
    """Dependency for getting database session"""
    async with AsyncSessionLocal() as session:
        try:
            yield session
        finally:
            await session.close()
