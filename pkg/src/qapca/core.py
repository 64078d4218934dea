"""Single-component, recursive and multi-component QAPCA"""
import logging
from typing import Optional

import numpy as np

from src.embedding.banding import apply_layout
from src.embedding.cache import EmbeddingCache, embedding_cache
from src.errors import DeflationError, DegenerateComponentsError, RankDeficientError
from src.ising.problem import SampleSet
from src.ising.solvers import solve
from src.linalg.core import DataMatrix, as_matrix, gram, nearest_orthonormal, nuclear_norm, nullspace_project
from src.qapca.models import BinaryAssignment, QapcaConfig, QapcaResult

logger = logging.getLogger(__name__)

DEFLATION_TOLERANCE = 1e-10


def l1_objective(X: DataMatrix, assignment) -> float:
    """‖X B‖_*², the multi-component L1-PCA objective"""
    B = assignment.B if isinstance(assignment, BinaryAssignment) else np.asarray(assignment)
    return nuclear_norm(as_matrix(X) @ B.reshape(B.shape[0], -1)) ** 2


def _solve_assignment(
    X: np.ndarray,
    k: int,
    config: QapcaConfig,
    reads: int,
    seed: int,
    cache: EmbeddingCache,
) -> tuple[BinaryAssignment, SampleSet, int, int]:
    """Band J = -XᵀX under the budget, solve, and keep the lowest-energy b'"""
    n = X.shape[1]
    layout = cache.get_or_build(n, k, config.budget)
    banded = apply_layout(-gram(X), layout, epsilon=config.epsilon if k > 1 else 0.0,
                          diagonal_scale=config.diagonal_scale)
    problem, scale = banded.normalized()
    samples = solve(
        problem,
        config.solver,
        config.schedule(reads, seed),
        remote_url=config.remote_url,
        workers=config.workers,
    ).rescaled(scale)
    assignment = BinaryAssignment.from_vector(samples.first, n, k)
    return assignment, samples, banded.kappa, banded.coupler_count


def qapca_single(
    X: DataMatrix,
    config: QapcaConfig,
    cache: Optional[EmbeddingCache] = None,
    reads: Optional[int] = None,
    seed: Optional[int] = None,
) -> QapcaResult:
    """
    One component: minimize bᵀJb over the banded problem, R = Xb̂ / ‖Xb̂‖.

    Raises RankDeficientError when Xb̂ = 0.
    """
    A = as_matrix(X)
    if A.shape[1] < 2:
        raise ValueError(f"need at least 2 samples, got N={A.shape[1]}")
    assignment, samples, kappa, couplers = _solve_assignment(
        A, 1, config,
        reads=config.reads if reads is None else reads,
        seed=config.seed if seed is None else seed,
        cache=cache or embedding_cache,
    )
    basis = nearest_orthonormal(A @ assignment.B)
    return QapcaResult(
        basis=basis,
        assignment=assignment,
        samples=[samples],
        kappa=kappa,
        coupler_count=couplers,
        objective=l1_objective(A, assignment),
    )


def qapca_recursive(
    X: DataMatrix,
    config: QapcaConfig,
    cache: Optional[EmbeddingCache] = None,
) -> QapcaResult:
    """
    QAPCA-R: K single-component solves with nullspace deflation between them.

    Component k uses reads_per_component reads and seed + k.
    """
    A = as_matrix(X)
    D, N = A.shape
    K = config.k
    if K > min(D, N):
        raise ValueError(f"K={K} exceeds min(D, N)={min(D, N)}")

    total = float(np.linalg.norm(A))
    Xk = A
    columns, assignments, sample_sets = [], [], []
    kappa, couplers = 0, 0
    for k in range(K):
        if total == 0.0 or np.linalg.norm(Xk) <= DEFLATION_TOLERANCE * total:
            raise DeflationError(f"data exhausted after {k} of {K} components", achieved_rank=k)
        try:
            step = qapca_single(Xk, config, cache=cache, reads=config.reads_per_component, seed=config.seed + k)
        except RankDeficientError as e:
            raise DeflationError(f"component {k + 1} has no energy left: {e}", achieved_rank=k) from e

        r = step.basis[:, 0]
        columns.append(r)
        assignments.append(step.assignment.B[:, 0])
        sample_sets.extend(step.samples)
        kappa, couplers = step.kappa, step.coupler_count
        Xk = nullspace_project(Xk, r)
        logger.debug(f"QAPCA-R component {k + 1}/{K}: energy {step.samples[0].best_energy:.6g}")

    assignment = BinaryAssignment(np.column_stack(assignments))
    return QapcaResult(
        basis=np.column_stack(columns),
        assignment=assignment,
        samples=sample_sets,
        kappa=kappa,
        coupler_count=couplers,
        objective=l1_objective(A, assignment),
    )


def qapca_multi(
    X: DataMatrix,
    config: QapcaConfig,
    cache: Optional[EmbeddingCache] = None,
) -> QapcaResult:
    """
    QAPCA: all K components from one K·N-spin problem with ε-weighted
    cross blocks, R = Φ(X B).

    Raises DegenerateComponentsError (carrying B) when X·B has rank < K.
    """
    A = as_matrix(X)
    K = config.k
    if A.shape[1] < 2:
        raise ValueError(f"need at least 2 samples, got N={A.shape[1]}")
    assignment, samples, kappa, couplers = _solve_assignment(
        A, K, config, reads=config.reads, seed=config.seed, cache=cache or embedding_cache,
    )
    try:
        basis = nearest_orthonormal(A @ assignment.B)
    except RankDeficientError as e:
        logger.warning(f"QAPCA returned {e.rank} independent components of {K} (epsilon={config.epsilon})")
        raise DegenerateComponentsError(
            f"X·B has rank {e.rank} < K={K}; lower K or raise epsilon",
            assignment=assignment,
            rank=e.rank,
        ) from e

    return QapcaResult(
        basis=basis,
        assignment=assignment,
        samples=[samples],
        kappa=kappa,
        coupler_count=couplers,
        objective=l1_objective(A, assignment),
    )
