"""Gram matrices, SVD, nuclear norm, Procrustes operator and deflation"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from src.errors import NonUnitVectorError, RankDeficientError, SvdConvergenceError

logger = logging.getLogger(__name__)

# D×N sample matrix, one sample per column
DataMatrix = np.ndarray
# D×K matrix with orthonormal columns
ComponentBasis = np.ndarray

RANK_TOLERANCE = 1e-10
UNIT_TOLERANCE = 1e-10


@dataclass(frozen=True)
class SvdResult:
    """Compact SVD, singular values sorted descending"""
    u: np.ndarray
    s: np.ndarray
    vt: np.ndarray

    @property
    def v(self) -> np.ndarray:
        return self.vt.T

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.vt


def as_matrix(M) -> np.ndarray:
    """Coerce to a finite 2-D float array"""
    A = np.asarray(M, dtype=float)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={A.ndim}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains non-finite entries")
    return A


def gram(X: DataMatrix) -> np.ndarray:
    """Return XᵀX (N×N). The Ising coupling matrix is its negation."""
    A = as_matrix(X)
    G = A.T @ A
    return 0.5 * (G + G.T)


def svd(M) -> SvdResult:
    """
    Compact SVD of M.

    Uses the divide-and-conquer LAPACK driver and retries once with the
    QR-iteration driver before giving up.
    """
    A = as_matrix(M)
    for driver in ("gesdd", "gesvd"):
        try:
            u, s, vt = sla.svd(A, full_matrices=False, lapack_driver=driver)
            return SvdResult(u=u, s=s, vt=vt)
        except np.linalg.LinAlgError as e:
            logger.warning(f"SVD driver {driver} failed on {A.shape} matrix: {e}")
    raise SvdConvergenceError(f"SVD did not converge for {A.shape[0]}x{A.shape[1]} matrix")


def numerical_rank(s: np.ndarray, rtol: float = RANK_TOLERANCE) -> int:
    """Count singular values above rtol·σ_max"""
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def nuclear_norm(M) -> float:
    """Sum of singular values"""
    return float(np.sum(svd(M).s))


def nearest_orthonormal(T) -> ComponentBasis:
    """
    Procrustes operator: the orthonormal G minimizing ‖T − G‖_F.

    Raises RankDeficientError when T does not have full column rank, since
    the minimizer is then not unique.
    """
    A = as_matrix(T)
    D, K = A.shape
    if K > D:
        raise ValueError(f"cannot orthonormalize {K} columns in dimension {D}")
    result = svd(A)
    rank = numerical_rank(result.s)
    if rank < K:
        raise RankDeficientError(
            f"matrix has rank {rank} < {K} columns; nearest orthonormal matrix is not unique",
            rank=rank,
        )
    return result.u @ result.vt


def nullspace_project(X: DataMatrix, r) -> DataMatrix:
    """Remove the r direction from every column: X − r rᵀ X"""
    A = as_matrix(X)
    v = np.asarray(r, dtype=float).ravel()
    if v.shape[0] != A.shape[0]:
        raise ValueError(f"direction has length {v.shape[0]}, data has {A.shape[0]} rows")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > UNIT_TOLERANCE:
        raise NonUnitVectorError(f"projection direction must be unit length, got norm {norm:.12g}")
    return A - np.outer(v, v @ A)
