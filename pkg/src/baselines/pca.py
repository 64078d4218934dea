"""L2-PCA by SVD and L1-PCA by greedy bit flipping (L1-BF)"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from src.errors import DegenerateComponentsError, RankDeficientError
from src.linalg.core import DataMatrix, ComponentBasis, as_matrix, nearest_orthonormal, numerical_rank, svd
from src.qapca.models import BinaryAssignment

logger = logging.getLogger(__name__)


def l2_pca(X: DataMatrix, k: int) -> ComponentBasis:
    """Top-K left singular vectors of X"""
    A = as_matrix(X)
    D, N = A.shape
    if k < 1 or k > min(D, N):
        raise ValueError(f"K={k} must lie in [1, min(D, N)={min(D, N)}]")
    result = svd(A)
    rank = numerical_rank(result.s)
    if k > rank:
        raise RankDeficientError(f"cannot extract {k} components from data of rank {rank}", rank=rank)
    return result.u[:, :k]


class L1bfConfig(BaseModel):
    """Bit-flipping search parameters"""
    restarts: int = Field(1, ge=1, description="Initializations; restart 0 starts from the SVD signs")
    max_flips: Optional[int] = Field(None, ge=1, description="Flip cap per restart; defaults to 100·N·K")
    seed: int = Field(0, ge=0, lt=2**63)
    workers: int = Field(1, ge=1, description="Threads running restarts")


@dataclass
class L1bfResult:
    """Winning restart of L1-BF"""
    basis: np.ndarray
    assignment: BinaryAssignment
    objective: float
    restart: int
    history: list[float] = field(default_factory=list)


def _nuclear_norms(stack: np.ndarray) -> np.ndarray:
    """Nuclear norm of every matrix in a (P, D, K) stack"""
    return np.linalg.svd(stack, compute_uv=False).sum(axis=-1)


def _initial_signs(A: np.ndarray, k: int, restart: int, seed: int) -> np.ndarray:
    N = A.shape[1]
    if restart == 0:
        V = svd(A).v[:, :k]
        B = np.sign(V)
        B[B == 0] = 1.0
        return B
    rng = np.random.default_rng([seed, restart])
    return rng.choice(np.array([-1.0, 1.0]), size=(N, k))


def _flip_search(A: np.ndarray, B: np.ndarray, max_flips: int) -> tuple[np.ndarray, list[float]]:
    """
    Greedy ascent on ‖XB‖_*: apply the single (n, k) flip with the largest
    strict improvement until none remains or the cap is hit.
    """
    N, K = B.shape
    XB = A @ B
    current = float(np.linalg.svd(XB, compute_uv=False).sum())
    history = [current]
    for _ in range(max_flips):
        # candidate (n, k): XB with column k shifted by -2·b_nk·x_n
        shifts = -2.0 * B[:, :, None] * A.T[:, None, :]  # N × K × D
        stack = np.repeat(XB[None, None, :, :], N, axis=0).repeat(K, axis=1)
        for k in range(K):
            stack[:, k, :, k] += shifts[:, k, :]
        scores = _nuclear_norms(stack.reshape(N * K, *XB.shape))
        best = int(np.argmax(scores))
        if scores[best] <= current * (1.0 + 1e-12):
            break
        n, k = divmod(best, K)
        XB[:, k] -= 2.0 * B[n, k] * A[:, n]
        B[n, k] = -B[n, k]
        current = float(scores[best])
        history.append(current)
    return B, history


def l1_bf(X: DataMatrix, k: int, cfg: Optional[L1bfConfig] = None) -> L1bfResult:
    """
    L1-PCA by bit flipping over `cfg.restarts` seeded initializations.

    The best restart by ‖XB‖_* wins (lowest restart index on ties) and
    R = Φ(XB). Raises DegenerateComponentsError when XB is rank deficient.
    """
    cfg = cfg or L1bfConfig()
    A = as_matrix(X)
    D, N = A.shape
    if k < 1 or k > min(D, N):
        raise ValueError(f"K={k} must lie in [1, min(D, N)={min(D, N)}]")
    max_flips = cfg.max_flips or 100 * N * k

    def run(restart: int) -> tuple[np.ndarray, list[float]]:
        return _flip_search(A, _initial_signs(A, k, restart, cfg.seed), max_flips)

    if cfg.workers > 1 and cfg.restarts > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            runs = list(pool.map(run, range(cfg.restarts)))
    else:
        runs = [run(r) for r in range(cfg.restarts)]

    winner = max(range(len(runs)), key=lambda r: (runs[r][1][-1], -r))
    B, history = runs[winner]
    assignment = BinaryAssignment(B)
    logger.debug(f"L1-BF: restart {winner} of {cfg.restarts} wins after {len(history) - 1} flips")

    try:
        basis = nearest_orthonormal(A @ assignment.B)
    except RankDeficientError as e:
        raise DegenerateComponentsError(
            f"L1-BF assignment gives rank {e.rank} < K={k}", assignment=assignment, rank=e.rank
        ) from e
    return L1bfResult(
        basis=basis,
        assignment=assignment,
        objective=history[-1] ** 2,
        restart=winner,
        history=history,
    )
