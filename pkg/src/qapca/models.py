"""Assignment, configuration and result types for QAPCA"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from src.config import settings
from src.embedding.banding import CouplerBudget
from src.ising.problem import AnnealSchedule, SampleSet, SolverKind


@dataclass(frozen=True)
class BinaryAssignment:
    """B ∈ {±1}^{N×K}; vec() stacks its columns as b' = [b_1; ...; b_K]"""
    B: np.ndarray

    def __post_init__(self):
        B = np.asarray(self.B)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        if B.ndim != 2 or not np.all((B == 1) | (B == -1)):
            raise ValueError("assignment entries must be exactly +1 or -1")
        object.__setattr__(self, "B", B.astype(np.int8))

    @property
    def n(self) -> int:
        return int(self.B.shape[0])

    @property
    def k(self) -> int:
        return int(self.B.shape[1])

    def vec(self) -> np.ndarray:
        return self.B.ravel(order="F")

    @classmethod
    def from_vector(cls, b, n: int, k: int) -> "BinaryAssignment":
        v = np.asarray(b)
        if v.size != n * k:
            raise ValueError(f"vector of length {v.size} cannot hold a {n}x{k} assignment")
        return cls(v.reshape(k, n).T)

    def distinct_columns(self) -> int:
        """Columns that differ up to sign"""
        canon = self.B * np.where(self.B[:1, :] < 0, -1, 1)
        return int(np.unique(canon.T, axis=0).shape[0])


class QapcaConfig(BaseModel):
    """Parameters for single, recursive and multi-component QAPCA"""
    k: int = Field(1, ge=1, description="Number of components")
    epsilon: float = Field(100.0, ge=0, description="Orthogonality weight")
    reads: int = Field(10, ge=1, description="Anneal reads per QAPCA solve")
    reads_per_component: int = Field(5, ge=1, description="Anneal reads per QAPCA-R component")
    solver: SolverKind = Field(SolverKind.SA, description="Ising backend")
    remote_url: Optional[str] = Field(None, description="Annealer endpoint for the remote solver")
    budget: CouplerBudget = Field(default_factory=CouplerBudget.from_n_limit)
    diagonal_scale: Optional[float] = Field(
        None,
        gt=0,
        description="Weight of diagonal blocks; defaults to K"
    )
    seed: int = Field(0, ge=0, lt=2**63)
    sweeps: int = Field(default_factory=lambda: settings.sa_sweeps, gt=0)
    beta_min: float = Field(default_factory=lambda: settings.sa_beta_min, gt=0)
    beta_max: float = Field(default_factory=lambda: settings.sa_beta_max, gt=0)
    workers: int = Field(1, ge=1, description="Threads for SA reads")

    def schedule(self, reads: int, seed: int) -> AnnealSchedule:
        return AnnealSchedule(
            sweeps=self.sweeps,
            beta_min=self.beta_min,
            beta_max=self.beta_max,
            reads=reads,
            seed=seed,
        )


@dataclass
class QapcaResult:
    """Components plus the solver evidence behind them"""
    basis: np.ndarray
    assignment: BinaryAssignment
    samples: list[SampleSet]
    kappa: int
    coupler_count: int
    objective: float
    metadata: dict = field(default_factory=dict)

    def diagnostics(self) -> dict:
        return {
            "kappa": self.kappa,
            "band_offset": self.kappa + 1,
            "coupler_count": self.coupler_count,
            "objective": self.objective,
            "best_energies": [s.best_energy for s in self.samples],
            "distinct_samples": [len(s) for s in self.samples],
            **self.metadata,
        }
