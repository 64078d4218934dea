"""Ising solve endpoint of the mock annealer"""
import asyncio
import logging

from fastapi import APIRouter, Depends, HTTPException, Request, status

from src.api.dependencies import verify_api_key
from src.api.limits import SOLVE_LIMIT, limiter
from src.api.models import SolveRequest, SolveResponse
from src.config import settings
from src.errors import InvalidProblemError
from src.ising.problem import AnnealSchedule, IsingProblem, SampleSet
from src.ising.solvers import solve_exhaustive, solve_sa

router = APIRouter(prefix="/ising", tags=["ising"], dependencies=[Depends(verify_api_key)])
logger = logging.getLogger(__name__)


def _run(problem: IsingProblem, reads: int, seed: int) -> SampleSet:
    """Exact answers for small problems, annealing above the mock's cap"""
    if problem.size <= settings.mock_exhaustive_max_spins:
        return solve_exhaustive(problem, max_spins=settings.mock_exhaustive_max_spins)
    schedule = AnnealSchedule(
        sweeps=settings.sa_sweeps,
        beta_min=settings.sa_beta_min,
        beta_max=settings.sa_beta_max,
        reads=reads,
        seed=seed,
    )
    return solve_sa(problem, schedule)


@router.post("/solve", response_model=SolveResponse)
@limiter.limit(SOLVE_LIMIT)
async def solve_problem(request: Request, body: SolveRequest):
    """
    Solve an Ising problem.

    - **size**: number of spins
    - **couplings**: upper-triangular (i, j, weight) triples
    - **num_reads**: reads requested; exact solves return at most this many states
    - **seed**: optional seed for reproducible reads
    """
    if body.size > settings.max_problem_spins:
        raise HTTPException(
            status_code=status.HTTP_413_REQUEST_ENTITY_TOO_LARGE,
            detail=f"Problem of {body.size} spins exceeds the limit of {settings.max_problem_spins}"
        )
    try:
        problem = IsingProblem.from_couplings(body.size, body.couplings)
    except InvalidProblemError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))

    result = await asyncio.to_thread(_run, problem, body.num_reads, body.seed or 0)
    keep = min(len(result), body.num_reads)
    request.app.state.problems_solved += 1
    logger.info(f"Solved {problem.size}-spin problem with {problem.num_couplings} couplings")

    return SolveResponse(
        samples=result.samples[:keep].astype(int).tolist(),
        energies=result.energies[:keep].tolist(),
        occurrences=result.occurrences[:keep].astype(int).tolist(),
    )
