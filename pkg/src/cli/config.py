"""Run configuration shared by the CLI subcommands"""
import json
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field

from src.baselines.pca import L1bfConfig
from src.embedding.banding import CouplerBudget
from src.ising.problem import SolverKind
from src.qapca.models import QapcaConfig


class RunConfig(BaseModel):
    """
    Every parameter of a run. Loaded from TOML or JSON, overridden by
    flags, validated, and echoed as JSON next to the outputs.
    """
    # fit
    input: Optional[Path] = Field(None, description="Sample-per-row CSV to fit")
    schema_name: Literal["plain", "wbcd", "tep"] = Field("plain", description="Column layout of the input CSV")
    method: Literal["qapca", "qapca-r", "l1-bf", "svd"] = "qapca"

    # QAPCA
    k: Optional[int] = Field(None, ge=1, description="Components; fit and embed default to 1, experiments to 4")
    epsilons: list[float] = Field(default_factory=lambda: [100.0], min_length=1)
    reads: int = Field(10, ge=1)
    reads_per_component: int = Field(5, ge=1)
    solver: SolverKind = SolverKind.SA
    remote_url: Optional[str] = None
    seed: int = Field(0, ge=0, lt=2**32)
    sweeps: Optional[int] = Field(None, gt=0)
    c_limit: Optional[int] = Field(None, gt=0, description="Coupler budget; derived from n_limit when unset")
    n_limit: Optional[int] = Field(None, gt=0)
    chain_margin: Optional[int] = Field(None, ge=0)
    restarts: Optional[int] = Field(None, ge=1, description="L1-BF initializations; fit defaults to 1, experiments to 32")

    # experiments
    trials: int = Field(10, ge=1)
    ns: Optional[list[int]] = Field(None, min_length=1)
    methods: Optional[list[str]] = None
    dimension: Optional[int] = Field(None, ge=1)
    data: Optional[Path] = None
    train: Optional[Path] = None
    test: Optional[Path] = None
    contamination: float = Field(0.0, ge=0, le=1)
    sigma: float = Field(100.0, ge=0)
    workers: int = Field(1, ge=1)

    # output
    out: Path = Path("results")
    format: Literal["csv", "json"] = "csv"

    @classmethod
    def load(cls, path: Optional[Path], overrides: dict) -> "RunConfig":
        """File values first, then every flag that was given"""
        data: dict = {}
        if path is not None:
            if not path.exists():
                raise FileNotFoundError(f"config file not found: {path}")
            text = path.read_text()
            data = tomllib.loads(text) if path.suffix == ".toml" else json.loads(text)
        data.update({key: value for key, value in overrides.items() if value is not None})
        return cls.model_validate(data)

    def budget(self) -> CouplerBudget:
        if self.c_limit is not None:
            return CouplerBudget(c_limit=self.c_limit)
        return CouplerBudget.from_n_limit(self.n_limit, self.chain_margin)

    def qapca_config(self, epsilon: Optional[float] = None) -> QapcaConfig:
        extra = {} if self.sweeps is None else {"sweeps": self.sweeps}
        return QapcaConfig(
            k=self.k or 1,
            epsilon=self.epsilons[0] if epsilon is None else epsilon,
            reads=self.reads,
            reads_per_component=self.reads_per_component,
            solver=self.solver,
            remote_url=self.remote_url,
            budget=self.budget(),
            seed=self.seed,
            **extra,
        )

    def l1bf_config(self, default_restarts: int = 1) -> L1bfConfig:
        return L1bfConfig(restarts=self.restarts or default_restarts, seed=self.seed)

    def echo(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2))
        return path
