"""Nuclear-norm relaxation bounds and cross-term diagnostics"""
import numpy as np
from scipy import linalg as sla

from src.errors import BoundUndefinedError
from src.linalg.core import DataMatrix, as_matrix, gram, nuclear_norm
from src.qapca.models import BinaryAssignment


def _columns(assignment) -> np.ndarray:
    B = assignment.B if isinstance(assignment, BinaryAssignment) else np.asarray(assignment, dtype=float)
    return B.reshape(B.shape[0], -1).astype(float)


def assignment_gram(X: DataMatrix, assignment) -> np.ndarray:
    """G_B = BᵀXᵀXB"""
    XB = as_matrix(X) @ _columns(assignment)
    return XB.T @ XB


def frobenius_relaxation(X: DataMatrix, assignment) -> float:
    """K·Tr(BᵀXᵀXB), the Cauchy-Schwarz upper bound on ‖XB‖_*²"""
    G = assignment_gram(X, assignment)
    return G.shape[0] * float(np.trace(G))


def epsilon_chain(X: DataMatrix, assignment, epsilon: float) -> tuple[float, float, float]:
    """
    The three sides of the ε-relaxation chain:
    ‖XB‖_*², (K + ε)Tr(G_B) - ε·1ᵀG_B1, K·Tr(G_B).
    """
    B = _columns(assignment)
    G = assignment_gram(X, B)
    K = G.shape[0]
    trace = float(np.trace(G))
    left = nuclear_norm(as_matrix(X) @ B) ** 2
    middle = (K + epsilon) * trace - epsilon * float(G.sum())
    return left, middle, K * trace


def epsilon_upper_bound(X: DataMatrix, assignment) -> float:
    """
    Largest ε keeping the relaxation between ‖XB‖_*² and K·Tr(G_B):
    [K·Tr(G_B) - ‖XB‖_*²] / [1ᵀG_B1 - Tr(G_B)].

    K = 1 has no cross terms and returns 0. Raises BoundUndefinedError when
    the denominator is not positive.
    """
    B = _columns(assignment)
    G = assignment_gram(X, B)
    K = G.shape[0]
    if K == 1:
        return 0.0
    trace = float(np.trace(G))
    denominator = float(G.sum()) - trace
    if denominator <= 1e-12 * max(trace, 1.0):
        raise BoundUndefinedError(f"cross-term sum {denominator:.3g} is not positive; epsilon bound undefined")
    numerator = K * trace - nuclear_norm(as_matrix(X) @ B) ** 2
    return max(numerator, 0.0) / denominator


def cross_term_alignment(X: DataMatrix, assignment, method: str = "direct") -> float:
    """
    Σ_{k1≠k2} b_k1ᵀXᵀXb_k2.

    method="eigen" evaluates Σ z_k1ᵀΛz_k2 with z_k = Qᵀb_k from the
    eigendecomposition XᵀX = QΛQᵀ.
    """
    B = _columns(assignment)
    if method == "direct":
        C = B.T @ gram(X) @ B
    elif method == "eigen":
        lam, Q = sla.eigh(gram(X))
        Z = Q.T @ B
        C = Z.T @ (lam[:, None] * Z)
    else:
        raise ValueError(f"unknown method {method!r}; use 'direct' or 'eigen'")
    return float(C.sum() - np.trace(C))
