"""Reconstruction error, assignment rank and squared prediction error"""
import numpy as np

from src.errors import UndefinedMetricError
from src.linalg.core import ComponentBasis, DataMatrix, as_matrix, numerical_rank, svd

RANK_TOLERANCE = 1e-8


def _check_basis(X: np.ndarray, R) -> np.ndarray:
    basis = as_matrix(R)
    if basis.shape[0] != X.shape[0]:
        raise ValueError(f"basis has D={basis.shape[0]} rows, data has D={X.shape[0]}")
    return basis


def residual(X: DataMatrix, R: ComponentBasis) -> np.ndarray:
    """X - R Rᵀ X"""
    A = as_matrix(X)
    basis = _check_basis(A, R)
    return A - basis @ (basis.T @ A)


def reconstruction_error(X_eval: DataMatrix, R: ComponentBasis) -> float:
    """‖X - R Rᵀ X‖_F² / ‖X‖_F²"""
    A = as_matrix(X_eval)
    denominator = float(np.sum(A * A))
    if denominator == 0.0:
        raise UndefinedMetricError("reconstruction error is undefined for all-zero data")
    r = residual(A, R)
    return float(np.sum(r * r)) / denominator


def average_rank(X: DataMatrix, B) -> int:
    """Numerical rank of X·B at relative tolerance 1e-8"""
    A = as_matrix(X)
    M = A @ np.asarray(B, dtype=float).reshape(A.shape[1], -1)
    return numerical_rank(svd(M).s, rtol=RANK_TOLERANCE)


def spe(x, R: ComponentBasis) -> float:
    """Squared prediction error of one sample"""
    v = np.asarray(x, dtype=float).reshape(-1, 1)
    r = residual(v, R)
    return float(np.sum(r * r))


def spe_scores(X: DataMatrix, R: ComponentBasis) -> np.ndarray:
    """SPE of every column of X"""
    r = residual(X, R)
    return np.sum(r * r, axis=0)
