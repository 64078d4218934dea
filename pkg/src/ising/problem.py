"""Ising problem, sample set and anneal schedule types"""
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.config import settings
from src.errors import InvalidProblemError, SpinVectorError

# Energies closer than this are treated as ties when ordering samples
ENERGY_DECIMALS = 9


class SolverKind(str, Enum):
    """Ising solver backend"""
    EXHAUSTIVE = "exhaustive"
    SA = "sa"
    REMOTE = "remote"


@dataclass(frozen=True, eq=False)
class IsingProblem:
    """
    Upper-triangular coupling list over `size` spins.

    E(s) = Σ w·s_i·s_j over (i, j, w) with i ≤ j; diagonal terms add the
    constant w because s_i² = 1.
    """
    size: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_couplings(cls, size: int, couplings: Iterable[Sequence[float]]) -> "IsingProblem":
        entries = list(couplings)
        if size < 1:
            raise InvalidProblemError(f"problem needs at least one spin, got size={size}")
        if entries:
            arr = np.asarray(entries, dtype=float)
            if arr.ndim != 2 or arr.shape[1] != 3:
                raise InvalidProblemError("couplings must be (i, j, weight) triples")
            rows, cols, weights = arr[:, 0], arr[:, 1], arr[:, 2]
            if np.any(rows != np.round(rows)) or np.any(cols != np.round(cols)):
                raise InvalidProblemError("coupling indices must be integers")
            rows, cols = rows.astype(np.int64), cols.astype(np.int64)
        else:
            rows = np.zeros(0, dtype=np.int64)
            cols = np.zeros(0, dtype=np.int64)
            weights = np.zeros(0, dtype=float)
        return cls.from_arrays(size, rows, cols, weights)

    @classmethod
    def from_arrays(cls, size: int, rows, cols, weights) -> "IsingProblem":
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        weights = np.asarray(weights, dtype=float)
        if not (rows.shape == cols.shape == weights.shape) or rows.ndim != 1:
            raise InvalidProblemError("coupling arrays must be aligned 1-D arrays")
        if rows.size:
            if rows.min() < 0 or cols.max() >= size:
                raise InvalidProblemError(f"coupling index out of range [0, {size})")
            if np.any(rows > cols):
                raise InvalidProblemError("couplings must satisfy i <= j")
            if not np.all(np.isfinite(weights)):
                raise InvalidProblemError("coupling weights must be finite")
            keys = rows * size + cols
            if np.unique(keys).size != keys.size:
                raise InvalidProblemError("duplicate (i, j) coupling")
        for arr in (rows, cols, weights):
            arr.setflags(write=False)
        return cls(size=size, rows=rows, cols=cols, weights=weights)

    @classmethod
    def from_upper(cls, U: np.ndarray, keep_zeros: bool = False) -> "IsingProblem":
        """Build from a dense matrix, reading only its upper triangle"""
        U = np.asarray(U, dtype=float)
        rows, cols = np.triu_indices(U.shape[0])
        weights = U[rows, cols]
        if not keep_zeros:
            mask = weights != 0.0
            rows, cols, weights = rows[mask], cols[mask], weights[mask]
        return cls.from_arrays(U.shape[0], rows, cols, weights)

    @property
    def num_couplings(self) -> int:
        return int(self.weights.size)

    @cached_property
    def upper(self) -> np.ndarray:
        """Dense upper-triangular coupling matrix (diagonal included)"""
        U = np.zeros((self.size, self.size))
        U[self.rows, self.cols] = self.weights
        return U

    @cached_property
    def interaction(self) -> np.ndarray:
        """Symmetric off-diagonal couplings with zero diagonal"""
        U = self.upper
        W = U + U.T
        np.fill_diagonal(W, 0.0)
        return W

    @property
    def offset(self) -> float:
        """Constant contributed by diagonal terms"""
        return float(np.trace(self.upper))

    def couplings(self) -> list[tuple[int, int, float]]:
        return [(int(i), int(j), float(w)) for i, j, w in zip(self.rows, self.cols, self.weights)]

    def scaled(self, factor: float) -> "IsingProblem":
        return IsingProblem.from_arrays(self.size, self.rows, self.cols, self.weights * factor)

    def energies(self, samples: np.ndarray) -> np.ndarray:
        """Energy of every row of a (S × size) spin array"""
        S = np.asarray(samples, dtype=float)
        if S.ndim == 1:
            S = S.reshape(1, -1)
        return np.einsum("ri,ri->r", S @ self.upper, S)


@dataclass(frozen=True)
class SampleSet:
    """Distinct spin vectors sorted by energy, first spin fixed to +1"""
    samples: np.ndarray
    energies: np.ndarray
    occurrences: np.ndarray

    @classmethod
    def from_raw(cls, samples, energies, occurrences: Optional[Sequence[int]] = None) -> "SampleSet":
        """
        Canonicalize, merge and sort raw solver output.

        Every vector is flipped so its first spin is +1 (energy is invariant
        under global sign), identical vectors are merged with summed
        occurrences, and ties in energy are broken lexicographically.
        """
        S = np.asarray(samples, dtype=np.int8)
        if S.ndim == 1:
            S = S.reshape(1, -1)
        E = np.asarray(energies, dtype=float).ravel()
        occ = np.ones(len(E), dtype=np.int64) if occurrences is None else np.asarray(occurrences, dtype=np.int64)
        if not (S.shape[0] == E.shape[0] == occ.shape[0]):
            raise ValueError("samples, energies and occurrences must be aligned")
        if S.shape[0] == 0:
            return cls(samples=S, energies=E, occurrences=occ)

        S = S * np.where(S[:, :1] < 0, -1, 1).astype(np.int8)
        unique, first, inverse = np.unique(S, axis=0, return_index=True, return_inverse=True)
        inverse = np.asarray(inverse).ravel()
        merged_occ = np.bincount(inverse, weights=occ, minlength=unique.shape[0]).astype(np.int64)
        merged_energy = E[first]

        keys = tuple(unique[:, j] for j in reversed(range(unique.shape[1])))
        order = np.lexsort(keys + (np.round(merged_energy, ENERGY_DECIMALS),))
        return cls(samples=unique[order], energies=merged_energy[order], occurrences=merged_occ[order])

    def __len__(self) -> int:
        return int(self.energies.shape[0])

    @property
    def first(self) -> np.ndarray:
        return self.samples[0]

    @property
    def best_energy(self) -> float:
        return float(self.energies[0])

    @property
    def num_reads(self) -> int:
        return int(self.occurrences.sum())

    def rescaled(self, factor: float) -> "SampleSet":
        """Multiply every energy by a positive factor"""
        return SampleSet(samples=self.samples, energies=self.energies * factor, occurrences=self.occurrences)

    def to_dict(self) -> dict:
        return {
            "samples": self.samples.astype(int).tolist(),
            "energies": self.energies.tolist(),
            "occurrences": self.occurrences.astype(int).tolist(),
        }


class AnnealSchedule(BaseModel):
    """Simulated-annealing schedule with a geometric β ramp"""
    sweeps: int = Field(default_factory=lambda: settings.sa_sweeps, gt=0, description="Metropolis sweeps per read")
    beta_min: float = Field(default_factory=lambda: settings.sa_beta_min, gt=0, description="Initial inverse temperature")
    beta_max: float = Field(default_factory=lambda: settings.sa_beta_max, gt=0, description="Final inverse temperature")
    reads: int = Field(10, ge=1, description="Independent restarts")
    seed: int = Field(0, ge=-(2**63), lt=2**64, description="Base seed; read r uses stream (seed, r)")

    @model_validator(mode="after")
    def _check_ramp(self) -> "AnnealSchedule":
        if self.beta_max <= self.beta_min:
            raise ValueError("beta_max must exceed beta_min")
        return self

    def betas(self) -> np.ndarray:
        return np.geomspace(self.beta_min, self.beta_max, self.sweeps)


def validate_spins(problem: IsingProblem, s) -> np.ndarray:
    """Return s as an int8 vector, raising SpinVectorError on bad input"""
    v = np.asarray(s)
    if v.ndim != 1 or v.shape[0] != problem.size:
        raise SpinVectorError(f"spin vector must have length {problem.size}, got shape {v.shape}")
    if not np.all((v == 1) | (v == -1)):
        raise SpinVectorError("spin vector entries must be +1 or -1")
    return v.astype(np.int8)
