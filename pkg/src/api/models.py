"""Pydantic models for the annealer wire protocol"""
from datetime import datetime
from typing import Optional
from pydantic import BaseModel, Field, model_validator

# sample sets order energies rounded to 9 decimals, then by spins
ENERGY_ORDER_RTOL = 1e-9


class SolveRequest(BaseModel):
    """POST /v1/ising/solve request body"""
    size: int = Field(..., ge=1, description="Number of spins M")
    couplings: list[tuple[int, int, float]] = Field(
        default_factory=list,
        description="Upper-triangular (i, j, weight) triples with i <= j"
    )
    num_reads: int = Field(
        10,
        ge=1,
        le=10000,
        description="Number of anneal reads"
    )
    seed: Optional[int] = Field(
        None,
        ge=0,
        lt=2**64,
        description="Seed for reproducible reads"
    )


class SolveResponse(BaseModel):
    """Solver output, arrays aligned and sorted by ascending energy"""
    samples: list[list[int]]
    energies: list[float]
    occurrences: list[int]

    @model_validator(mode="after")
    def _check_alignment(self) -> "SolveResponse":
        if not (len(self.samples) == len(self.energies) == len(self.occurrences)):
            raise ValueError("samples, energies and occurrences must have equal length")
        if not self.samples:
            raise ValueError("response carries no samples")
        if any(o < 1 for o in self.occurrences):
            raise ValueError("occurrences must be positive")
        if any(out_of_order(a, b) for a, b in zip(self.energies, self.energies[1:])):
            raise ValueError("samples must be sorted by ascending energy")
        return self


def out_of_order(a: float, b: float) -> bool:
    """b sorts before a by more than rounding noise; near-ties may come in either order"""
    return b < a - ENERGY_ORDER_RTOL * max(1.0, abs(a))


class EmbeddingLayoutResponse(BaseModel):
    """Banded coupling layout for a (N, K) problem"""
    N: int
    K: int
    kappa: int
    band_offset: int
    epsilon: float
    c_limit: int
    coupler_count: int
    couplings: list[tuple[int, int, float]]


class HealthResponse(BaseModel):
    """Health check response"""
    status: str
    uptime: int
    cached_embeddings: int
    problems_solved: int
    version: str
    timestamp: datetime


class ErrorResponse(BaseModel):
    """Error response"""
    error: str
    detail: Optional[str] = None
