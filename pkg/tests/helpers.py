"""Test oracles"""
import itertools
import socket

import numpy as np

from src.ising.problem import IsingProblem


def quadratic_form_problem(J) -> IsingProblem:
    """Ising problem whose energy is the full quadratic form bᵀJb"""
    A = np.asarray(J, dtype=float)
    return IsingProblem.from_upper(2.0 * np.triu(A, 1) + np.diag(np.diag(A)))


def sign_vectors(n: int) -> np.ndarray:
    """All 2^n vectors in {±1}^n"""
    return np.array(list(itertools.product([1.0, -1.0], repeat=n)))


def brute_force_l1(X: np.ndarray) -> tuple[np.ndarray, float]:
    """argmax of ‖Xb‖₂ over every sign vector, first spin fixed to +1"""
    candidates = sign_vectors(X.shape[1])
    candidates = candidates[candidates[:, 0] > 0]
    norms = np.linalg.norm(X @ candidates.T, axis=0)
    best = int(np.argmax(norms))
    return candidates[best], float(norms[best])


def projector(R: np.ndarray) -> np.ndarray:
    return R @ R.T


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]
