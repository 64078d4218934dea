"""Coupler budget, band offset selection and banded coupling layouts"""
import json
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from src.config import settings
from src.errors import AsymmetricCouplingError, InfeasibleBudgetError
from src.ising.problem import IsingProblem

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-10

# Layout entry kinds
INTRA_DIAGONAL = 0
INTRA_BAND = 1
CROSS_BLOCK = 2


def coupler_count(n: int, k: int) -> int:
    """Couplers needed to fully embed a K-component problem on N samples"""
    if n < 1 or k < 1:
        raise ValueError(f"N and K must be positive, got N={n}, K={k}")
    kn = k * n
    return (kn * kn - kn) // 2 + kn


class CouplerBudget(BaseModel):
    """Abstract hardware budget"""
    c_limit: int = Field(..., gt=0, description="Maximum usable couplers")
    n_limit: int = Field(default_factory=lambda: settings.n_limit, gt=0, description="Largest fully embeddable N")
    chain_margin: int = Field(default_factory=lambda: settings.chain_margin, ge=0, description="Samples lost to chains")

    @classmethod
    def from_n_limit(cls, n_limit: Optional[int] = None, chain_margin: Optional[int] = None) -> "CouplerBudget":
        """C_limit from the derated sample limit, e.g. 175 - 25 = 150 -> 11,325"""
        n_limit = settings.n_limit if n_limit is None else n_limit
        chain_margin = settings.chain_margin if chain_margin is None else chain_margin
        usable = n_limit - chain_margin
        if usable < 1:
            raise InfeasibleBudgetError(f"chain margin {chain_margin} leaves no usable samples out of {n_limit}")
        return cls(c_limit=coupler_count(usable, 1), n_limit=n_limit, chain_margin=chain_margin)


def band_width(n: int, band_offset: int) -> int:
    """Entries of one upper-triangular block with 0 <= j - i < band_offset"""
    b = min(band_offset, n)
    return b * n - b * (b - 1) // 2


def layout_coupler_count(n: int, k: int, band_offset: int) -> int:
    """Couplers emitted for K blocks banded at the given offset"""
    intra = band_width(n, band_offset)
    cross = 2 * intra - n
    return k * intra + (k * k - k) // 2 * cross


def compute_kappa(n: int, c_limit: int, k: int = 1) -> int:
    """
    Largest κ in {0, ..., N-1} whose banded layout (offsets 0..κ kept) fits
    in c_limit couplers. For K = 1 this is the largest κ with
    (2N - κ)(κ + 1) / 2 <= C_limit.

    Raises InfeasibleBudgetError when not even the superdiagonal fits, since
    every spin must keep at least one off-diagonal coupling.
    """
    if n < 1 or k < 1:
        raise ValueError(f"N and K must be positive, got N={n}, K={k}")
    kappas = np.arange(n, dtype=np.int64)
    bands = kappas + 1
    intra = bands * n - bands * (bands - 1) // 2
    counts = k * intra + (k * k - k) // 2 * (2 * intra - n)
    feasible = kappas[counts <= c_limit]
    minimum = 0 if n == 1 else 1
    if feasible.size == 0 or feasible.max() < minimum:
        needed = layout_coupler_count(n, k, minimum + 1)
        raise InfeasibleBudgetError(
            f"budget of {c_limit} couplers cannot hold N={n}, K={k}; at least {needed} are needed"
        )
    return int(feasible.max())


@dataclass(frozen=True, eq=False)
class EmbeddingLayout:
    """
    Coupler index layout for K blocks of N spins, spin k·N + i for
    component k and sample i. (src_i, src_j) name the J entry each coupler
    reads; kind tells how it is weighted.
    """
    n: int
    k: int
    kappa: int
    rows: np.ndarray
    cols: np.ndarray
    src_i: np.ndarray
    src_j: np.ndarray
    kind: np.ndarray

    @property
    def band_offset(self) -> int:
        return self.kappa + 1

    @property
    def coupler_count(self) -> int:
        return int(self.rows.size)

    def to_dict(self) -> dict:
        return {
            "N": self.n,
            "K": self.k,
            "kappa": self.kappa,
            "rows": self.rows.tolist(),
            "cols": self.cols.tolist(),
            "src_i": self.src_i.tolist(),
            "src_j": self.src_j.tolist(),
            "kind": self.kind.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EmbeddingLayout":
        return cls(
            n=int(data["N"]),
            k=int(data["K"]),
            kappa=int(data["kappa"]),
            rows=np.asarray(data["rows"], dtype=np.int64),
            cols=np.asarray(data["cols"], dtype=np.int64),
            src_i=np.asarray(data["src_i"], dtype=np.int64),
            src_j=np.asarray(data["src_j"], dtype=np.int64),
            kind=np.asarray(data["kind"], dtype=np.int8),
        )

    def same_as(self, other: "EmbeddingLayout") -> bool:
        return (
            (self.n, self.k, self.kappa) == (other.n, other.k, other.kappa)
            and all(
                np.array_equal(getattr(self, name), getattr(other, name))
                for name in ("rows", "cols", "src_i", "src_j", "kind")
            )
        )


def build_layout(n: int, k: int, band_offset: int) -> EmbeddingLayout:
    """Index layout keeping J entries with |i - j| < band_offset"""
    if band_offset < 1:
        raise ValueError(f"band offset must be at least 1, got {band_offset}")
    b = min(band_offset, n)
    # one block's upper band: 0 <= j - i < b
    ui, uj = np.triu_indices(n)
    keep = (uj - ui) < b
    ui, uj = ui[keep], uj[keep]
    # cross blocks are full-square bands: |i - j| < b
    ci, cj = np.nonzero(np.abs(np.subtract.outer(np.arange(n), np.arange(n))) < b)

    rows, cols, src_i, src_j, kind = [], [], [], [], []
    for k1 in range(k):
        for k2 in range(k1, k):
            if k1 == k2:
                rows.append(k1 * n + ui)
                cols.append(k1 * n + uj)
                src_i.append(ui)
                src_j.append(uj)
                kind.append(np.where(ui == uj, INTRA_DIAGONAL, INTRA_BAND))
            else:
                rows.append(k1 * n + ci)
                cols.append(k2 * n + cj)
                src_i.append(ci)
                src_j.append(cj)
                kind.append(np.full(ci.shape, CROSS_BLOCK))
    return EmbeddingLayout(
        n=n,
        k=k,
        kappa=b - 1,
        rows=np.concatenate(rows).astype(np.int64),
        cols=np.concatenate(cols).astype(np.int64),
        src_i=np.concatenate(src_i).astype(np.int64),
        src_j=np.concatenate(src_j).astype(np.int64),
        kind=np.concatenate(kind).astype(np.int8),
    )


@dataclass(frozen=True, eq=False)
class BandedCoupling:
    """Banded estimate Ĵ of a coupling matrix as an Ising problem over K·N spins"""
    n: int
    k: int
    kappa: int
    epsilon: float
    diagonal_scale: float
    problem: IsingProblem

    @property
    def band_offset(self) -> int:
        return self.kappa + 1

    @property
    def coupler_count(self) -> int:
        return self.problem.num_couplings

    def normalized(self) -> tuple[IsingProblem, float]:
        """
        Problem rescaled to max |weight| = 1, plus the factor that maps its
        energies back to this problem's energies.
        """
        peak = float(np.max(np.abs(self.problem.weights))) if self.problem.num_couplings else 0.0
        if peak == 0.0:
            return self.problem, 1.0
        return self.problem.scaled(1.0 / peak), peak

    def to_dict(self) -> dict:
        return {
            "N": self.n,
            "K": self.k,
            "kappa": self.kappa,
            "epsilon": self.epsilon,
            "couplings": [list(c) for c in self.problem.couplings()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def check_symmetric(J) -> np.ndarray:
    A = np.asarray(J, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise AsymmetricCouplingError(f"coupling matrix must be square, got shape {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    if not np.allclose(A, A.T, rtol=0.0, atol=SYMMETRY_TOLERANCE * scale):
        raise AsymmetricCouplingError("coupling matrix is not symmetric")
    return A


def apply_layout(
    J,
    layout: EmbeddingLayout,
    epsilon: float = 0.0,
    diagonal_scale: Optional[float] = None,
) -> BandedCoupling:
    """
    Fill a layout with weights from J.

    Diagonal blocks carry diagonal_scale·Ĵ (halved diagonal); blocks k1 < k2
    carry -ε·J over the band, which keeps the upper-triangular energy equal
    to half of b'ᵀ[I ⊗ cJ + (1 - I) ⊗ (-εJ)]b' at full band.
    """
    A = check_symmetric(J)
    if A.shape[0] != layout.n:
        raise ValueError(f"layout is for N={layout.n}, matrix has N={A.shape[0]}")
    if epsilon < 0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    scale = float(layout.k if diagonal_scale is None else diagonal_scale)

    factor = np.select(
        [layout.kind == INTRA_DIAGONAL, layout.kind == INTRA_BAND],
        [0.5 * scale, scale],
        default=-epsilon,
    )
    weights = factor * A[layout.src_i, layout.src_j]
    problem = IsingProblem.from_arrays(layout.n * layout.k, layout.rows, layout.cols, weights)
    return BandedCoupling(
        n=layout.n,
        k=layout.k,
        kappa=layout.kappa,
        epsilon=float(epsilon),
        diagonal_scale=scale,
        problem=problem,
    )


def _check_band_offset(n: int, band_offset: int) -> None:
    if n >= 2 and band_offset < 2:
        raise ValueError(f"band offset {band_offset} would leave spins without couplings; need >= 2")


def band_single(J, band_offset: int) -> BandedCoupling:
    """K = 1 banding: keep 0 < j - i < band_offset at J_ij, diagonal at J_ii / 2"""
    A = check_symmetric(J)
    _check_band_offset(A.shape[0], band_offset)
    return apply_layout(A, build_layout(A.shape[0], 1, band_offset), diagonal_scale=1.0)


def band_multi(
    J,
    k: int,
    epsilon: float,
    band_offset: int,
    diagonal_scale: Optional[float] = None,
) -> BandedCoupling:
    """Block-banded Kronecker expansion for K components"""
    A = check_symmetric(J)
    if k < 1:
        raise ValueError(f"K must be positive, got {k}")
    _check_band_offset(A.shape[0], band_offset)
    return apply_layout(A, build_layout(A.shape[0], k, band_offset), epsilon, diagonal_scale)
