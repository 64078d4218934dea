"""Embedding layout endpoint"""
import logging
from typing import Optional

import numpy as np
from fastapi import APIRouter, Depends, HTTPException, Query, Request, status
from sqlalchemy.ext.asyncio import AsyncSession

from src.api.dependencies import verify_api_key
from src.api.limits import SOLVE_LIMIT, limiter
from src.api.models import EmbeddingLayoutResponse
from src.config import settings
from src.embedding.banding import CouplerBudget, apply_layout
from src.embedding.database import get_session
from src.embedding.store import embedding_store
from src.errors import InfeasibleBudgetError

router = APIRouter(prefix="/embeddings", tags=["embeddings"], dependencies=[Depends(verify_api_key)])
logger = logging.getLogger(__name__)


@router.get("/{n}/{k}", response_model=EmbeddingLayoutResponse)
@limiter.limit(SOLVE_LIMIT)
async def get_embedding(
    request: Request,
    n: int,
    k: int,
    c_limit: Optional[int] = Query(None, gt=0, description="Coupler budget; defaults to the derated N limit"),
    epsilon: float = Query(1.0, ge=0, description="Cross-block weight of the template"),
    session: AsyncSession = Depends(get_session),
):
    """
    Banded coupling template for N samples and K components.

    Couplings are filled from J = -11ᵀ so callers can read off the pattern
    and the relative weights.
    """
    if n < 1 or k < 1:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail="N and K must be positive")
    if n * k > settings.max_problem_spins:
        raise HTTPException(
            status_code=status.HTTP_413_REQUEST_ENTITY_TOO_LARGE,
            detail=f"N·K = {n * k} spins exceeds the limit of {settings.max_problem_spins}"
        )
    budget = CouplerBudget(c_limit=c_limit) if c_limit else CouplerBudget.from_n_limit()
    try:
        layout, stored = await embedding_store.get_or_build(session, n, k, budget)
    except InfeasibleBudgetError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    logger.debug(f"Embedding N={n} K={k} served from {'store' if stored else 'fresh build'}")

    banded = apply_layout(-np.ones((n, n)), layout, epsilon=epsilon)
    return EmbeddingLayoutResponse(
        N=n,
        K=k,
        kappa=layout.kappa,
        band_offset=layout.band_offset,
        epsilon=epsilon,
        c_limit=budget.c_limit,
        coupler_count=layout.coupler_count,
        couplings=banded.problem.couplings(),
    )
