"""Exhaustive and simulated-annealing Ising solvers"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.config import settings
from src.errors import ProblemTooLargeError
from src.ising.problem import (
    ENERGY_DECIMALS, AnnealSchedule, IsingProblem, SampleSet, SolverKind, validate_spins,
)

logger = logging.getLogger(__name__)

EXHAUSTIVE_CHUNK = 1 << 15
EXHAUSTIVE_KEEP = 64


def energy(problem: IsingProblem, s) -> float:
    """Σ w·s_i·s_j over the coupling list"""
    v = validate_spins(problem, s)
    return float(problem.energies(v)[0])


def _spins_from_index(idx: np.ndarray, size: int) -> np.ndarray:
    """
    Map enumeration indices to spin vectors with s_0 = +1.

    Bit (size-1-j) of the index drives spin j, 0 -> -1, so index order is
    lexicographic order of the spin vectors.
    """
    free = size - 1
    S = np.ones((idx.shape[0], size), dtype=np.int8)
    if free:
        shifts = np.arange(free - 1, -1, -1, dtype=np.int64)
        bits = (idx[:, None] >> shifts[None, :]) & 1
        S[:, 1:] = (2 * bits - 1).astype(np.int8)
    return S


def solve_exhaustive(
    problem: IsingProblem,
    max_spins: Optional[int] = None,
    keep: int = EXHAUSTIVE_KEEP,
) -> SampleSet:
    """
    Enumerate every spin vector (up to global sign) and return the `keep`
    lowest-energy ones, the exact optimum first.
    """
    cap = settings.exhaustive_max_spins if max_spins is None else max_spins
    if problem.size > cap:
        raise ProblemTooLargeError(
            f"exhaustive solver refuses {problem.size} spins (cap {cap}); use the sa or remote solver"
        )

    total = 1 << (problem.size - 1)
    pool_idx = np.zeros(0, dtype=np.int64)
    pool_e = np.zeros(0, dtype=float)
    for start in range(0, total, EXHAUSTIVE_CHUNK):
        idx = np.arange(start, min(start + EXHAUSTIVE_CHUNK, total), dtype=np.int64)
        e = problem.energies(_spins_from_index(idx, problem.size))
        best = np.argsort(np.round(e, ENERGY_DECIMALS), kind="stable")[:keep]
        pool_idx = np.concatenate([pool_idx, idx[best]])
        pool_e = np.concatenate([pool_e, e[best]])
        order = np.lexsort((pool_idx, np.round(pool_e, ENERGY_DECIMALS)))[:keep]
        pool_idx, pool_e = pool_idx[order], pool_e[order]

    logger.debug(f"Exhaustive search over {total} sign classes, best energy {pool_e[0]:.6g}")
    return SampleSet.from_raw(_spins_from_index(pool_idx, problem.size), pool_e)


@dataclass
class AnnealOutcome:
    """Per-read results of simulated annealing"""
    states: np.ndarray
    energies: np.ndarray
    best_trace: np.ndarray  # reads × sweeps best-so-far energy


def _read_rng(seed: int, read: int) -> np.random.Generator:
    return np.random.default_rng([seed % (1 << 64), read])


def anneal(problem: IsingProblem, schedule: AnnealSchedule, read_indices) -> AnnealOutcome:
    """
    Run the given reads as single-spin-flip Metropolis chains.

    Reads are vectorized together but each draws only from its own seeded
    stream, so any partition of reads gives the same per-read result.
    """
    reads = [int(r) for r in read_indices]
    rngs = [_read_rng(schedule.seed, r) for r in reads]
    M = problem.size
    W = problem.interaction
    offset = problem.offset

    S = np.stack([rng.choice(np.array([-1.0, 1.0]), size=M) for rng in rngs])
    # row by row so each read sees identical arithmetic however reads are batched
    fields = np.stack([s @ W for s in S])
    current = 0.5 * np.einsum("ri,ri->r", fields, S) + offset
    best_states = S.copy()
    best = current.copy()
    trace = np.empty((len(reads), schedule.sweeps))

    for sweep, beta in enumerate(schedule.betas()):
        uniforms = np.stack([rng.random(M) for rng in rngs])
        for i in range(M):
            delta = -2.0 * S[:, i] * fields[:, i]
            accept = (delta <= 0.0) | (uniforms[:, i] < np.exp(-beta * np.maximum(delta, 0.0)))
            if not accept.any():
                continue
            step = np.where(accept, -2.0 * S[:, i], 0.0)
            S[:, i] += step
            fields += step[:, None] * W[i][None, :]
            current += np.where(accept, delta, 0.0)
        improved = current < best
        if improved.any():
            best[improved] = current[improved]
            best_states[improved] = S[improved]
        trace[:, sweep] = best

    exact = np.array([problem.energies(s)[0] for s in best_states])
    return AnnealOutcome(states=best_states.astype(np.int8), energies=exact, best_trace=trace)


def solve_sa(problem: IsingProblem, schedule: AnnealSchedule, workers: int = 1) -> SampleSet:
    """Simulated annealing with `schedule.reads` independent seeded restarts"""
    indices = np.arange(schedule.reads)
    if workers > 1 and schedule.reads > 1:
        chunks = [c for c in np.array_split(indices, min(workers, schedule.reads)) if c.size]
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            outcomes = list(pool.map(lambda c: anneal(problem, schedule, c), chunks))
        states = np.concatenate([o.states for o in outcomes])
        energies = np.concatenate([o.energies for o in outcomes])
    else:
        outcome = anneal(problem, schedule, indices)
        states, energies = outcome.states, outcome.energies

    result = SampleSet.from_raw(states, energies)
    logger.debug(
        f"SA on {problem.size} spins: {schedule.reads} reads x {schedule.sweeps} sweeps, "
        f"best energy {result.best_energy:.6g}"
    )
    return result


def solve(
    problem: IsingProblem,
    solver: SolverKind,
    schedule: AnnealSchedule,
    remote_url: Optional[str] = None,
    workers: int = 1,
) -> SampleSet:
    """Dispatch to the selected backend"""
    if solver == SolverKind.EXHAUSTIVE:
        return solve_exhaustive(problem)
    if solver == SolverKind.SA:
        return solve_sa(problem, schedule, workers=workers)
    if solver == SolverKind.REMOTE:
        from src.ising.remote import solve_remote
        return solve_remote(problem, remote_url or settings.remote_url, schedule.reads, seed=schedule.seed)
    raise ValueError(f"unknown solver {solver!r}")
