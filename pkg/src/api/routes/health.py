"""Health check endpoint"""
from datetime import datetime, timezone

from fastapi import APIRouter, Depends, Request
from sqlalchemy.ext.asyncio import AsyncSession

from src.api.models import HealthResponse
from src.config import settings
from src.embedding.database import get_session
from src.embedding.store import embedding_store

router = APIRouter()


@router.get("/health", response_model=HealthResponse)
async def health_check(request: Request, session: AsyncSession = Depends(get_session)):
    """Service status with store and solve counters"""
    started = request.app.state.started_at
    return HealthResponse(
        status="healthy",
        uptime=int((datetime.now(timezone.utc) - started).total_seconds()),
        cached_embeddings=await embedding_store.count(session),
        problems_solved=request.app.state.problems_solved,
        version=settings.version,
        timestamp=datetime.now(timezone.utc),
    )
