"""Gaussian, WBCD and TEP experiment protocols"""
import logging
import time
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, field_validator, model_validator

from src.baselines.pca import L1bfConfig, l1_bf, l2_pca
from src.errors import DeflationError, DegenerateComponentsError
from src.evaluation.corruption import corrupt_mislabel, corrupt_noise
from src.evaluation.datasets import (
    LabeledDataset, gen_fault_toy, gen_gaussian_split, robust_scale, standardize,
)
from src.evaluation.detection import default_threshold_grid, roc_prc
from src.evaluation.io import TEP_SCHEMA, WBCD_SCHEMA, load_csv, write_table
from src.evaluation.metrics import average_rank, reconstruction_error, spe_scores
from src.experiments.worker import TrialPool
from src.linalg.core import svd
from src.qapca.core import l1_objective, qapca_multi, qapca_recursive
from src.qapca.models import QapcaConfig

logger = logging.getLogger(__name__)

METHODS = ("qapca", "qapca-r", "l1-bf", "svd")
EPSILON_METHODS = {"qapca"}
# L1-BF initializations per fit in the experiment protocols
EXPERIMENT_RESTARTS = 32
GROUP_COLUMNS = ["method", "K", "N", "epsilon"]
METRIC_COLUMNS = [
    "recon_train", "recon_test", "avg_rank", "objective", "auroc", "auprc", "elapsed_s",
]


class ExperimentConfig(BaseModel):
    """Settings shared by every protocol"""
    trials: int = Field(10, ge=1, description="Independent seeded realizations")
    seed: int = Field(0, ge=0, lt=2**32, description="Base seed; trial seeds derive from it")
    k: int = Field(4, ge=1, description="Number of components")
    ns: list[int] = Field(default_factory=lambda: [20], description="Training sample counts to sweep")
    epsilons: list[float] = Field(default_factory=lambda: [100.0], description="Orthogonality weights to sweep")
    methods: list[str] = Field(default_factory=lambda: list(METHODS))
    qapca: QapcaConfig = Field(default_factory=QapcaConfig)
    l1bf: L1bfConfig = Field(default_factory=lambda: L1bfConfig(restarts=EXPERIMENT_RESTARTS))
    workers: int = Field(1, ge=1, description="Trial worker processes")

    @field_validator("ns")
    @classmethod
    def _check_ns(cls, v: list[int]) -> list[int]:
        if not v or min(v) < 2:
            raise ValueError("ns must be non-empty with every N >= 2")
        return v

    @field_validator("epsilons")
    @classmethod
    def _check_epsilons(cls, v: list[float]) -> list[float]:
        if not v or min(v) < 0:
            raise ValueError("epsilons must be non-empty and nonnegative")
        return v

    @field_validator("methods")
    @classmethod
    def _check_methods(cls, v: list[str]) -> list[str]:
        unknown = sorted(set(v) - set(METHODS))
        if not v or unknown:
            raise ValueError(f"methods must be drawn from {list(METHODS)}, got unknown {unknown}")
        return v


class GaussianExperiment(ExperimentConfig):
    """ε sweep on the three-source Gaussian superposition"""
    dimension: int = Field(10, ge=1)
    n_test: int = Field(200, ge=1, description="Held-out clean samples per trial")
    contamination_fraction: float = Field(0.0, ge=0, le=1)
    contamination_sigma: float = Field(100.0, ge=0)


class WbcdExperiment(ExperimentConfig):
    """N sweep on breast-cancer data with a mislabeled training pool"""
    data_path: Path
    ns: list[int] = Field(default_factory=lambda: [20, 40, 60, 80, 100])
    target: str = Field("benign", description="Class the training pool is drawn from")
    mislabel_fraction: float = Field(0.2, ge=0, le=1)


class TepExperiment(ExperimentConfig):
    """SPE fault detection with noise-corrupted training samples"""
    train_path: Optional[Path] = None
    test_path: Optional[Path] = None
    ns: list[int] = Field(default_factory=lambda: [50])
    noise_fraction: float = Field(0.2, ge=0, le=1)
    noise_sigma: float = Field(100.0, ge=0)
    dimension: int = Field(10, ge=1, description="Features of the synthetic stand-in")
    fault_runs: int = Field(3, ge=1)
    run_length: int = Field(200, ge=2)
    fault_onset: int = Field(160, ge=1)
    curves: bool = Field(True, description="Emit per-threshold ROC/PRC points")

    @model_validator(mode="after")
    def _check_paths(self) -> "TepExperiment":
        if (self.train_path is None) != (self.test_path is None):
            raise ValueError("train_path and test_path must be given together")
        return self


@dataclass
class MethodFit:
    basis: Optional[np.ndarray]
    assignment: Optional[np.ndarray]
    status: str
    objective: float = float("nan")


@dataclass
class TrialOutput:
    rows: list[dict]
    curves: list[dict] = field(default_factory=list)


@dataclass
class ExperimentResult:
    """Per-trial rows, their aggregate, and optional curve points"""
    name: str
    trials: pd.DataFrame
    aggregate: pd.DataFrame
    curves: Optional[pd.DataFrame] = None

    def write(self, out_dir, fmt: str = "csv") -> list[Path]:
        out = Path(out_dir)
        paths = [
            write_table(self.trials, out / f"{self.name}_trials.{fmt}", fmt),
            write_table(self.aggregate, out / f"{self.name}_summary.{fmt}", fmt),
        ]
        if self.curves is not None and len(self.curves):
            paths.append(write_table(self.curves, out / f"{self.name}_curves.{fmt}", fmt))
        return paths


def derive_seed(base: int, *keys: int) -> int:
    """Stable 32-bit seed for one (trial, N, ...) cell"""
    return int(np.random.SeedSequence([base, *keys]).generate_state(1)[0])


def _column_space(M: np.ndarray, rank: int) -> Optional[np.ndarray]:
    if rank == 0:
        return None
    return svd(M).u[:, :rank]


def fit_method(method: str, X: np.ndarray, k: int, epsilon: float, config: ExperimentConfig, seed: int) -> MethodFit:
    """
    Fit one method. Degenerate multi-component outcomes fall back to the
    column space of XB so they can still be scored.
    """
    try:
        if method == "svd":
            return MethodFit(basis=l2_pca(X, k), assignment=None, status="ok")
        if method == "l1-bf":
            result = l1_bf(X, k, config.l1bf.model_copy(update={"seed": seed}))
        else:
            qcfg = config.qapca.model_copy(update={"k": k, "epsilon": epsilon, "seed": seed})
            solver = qapca_multi if method == "qapca" else qapca_recursive
            result = solver(X, qcfg)
        return MethodFit(
            basis=result.basis,
            assignment=result.assignment.B,
            status="ok",
            objective=result.objective,
        )
    except DegenerateComponentsError as e:
        B = e.assignment.B
        return MethodFit(
            basis=_column_space(X @ B, e.rank),
            assignment=B,
            status="degenerate",
            objective=l1_objective(X, B),
        )
    except DeflationError as e:
        logger.warning(f"{method} stopped after {e.achieved_rank} of {k} components")
        return MethodFit(basis=None, assignment=None, status="deflated")


def _evaluate_methods(
    config: ExperimentConfig,
    train: np.ndarray,
    n: int,
    seed: int,
    base: dict,
    score: Callable[[MethodFit, dict], dict],
) -> list[dict]:
    """One row per (method, ε) cell; ε applies to qapca only"""
    rows = []
    for method in config.methods:
        epsilons = config.epsilons if method in EPSILON_METHODS else [float("nan")]
        for epsilon in epsilons:
            key = {**base, "method": method, "K": config.k, "N": n, "epsilon": epsilon}
            started = time.perf_counter()
            fit = fit_method(method, train, config.k, epsilon, config, seed)
            elapsed = time.perf_counter() - started
            if method == "svd":
                rank = config.k
            elif fit.assignment is None:
                rank = float("nan")
            else:
                rank = average_rank(train, fit.assignment)
            rows.append({
                **key,
                "status": fit.status,
                "avg_rank": rank,
                "objective": fit.objective,
                "elapsed_s": elapsed,
                **score(fit, key),
            })
            logger.debug(f"Trial {base['trial']} {method} N={n} eps={epsilon}: {fit.status} in {elapsed:.3f}s")
    return rows


def _recon(X: np.ndarray, fit: MethodFit) -> float:
    if fit.basis is None:
        return float("nan")
    return reconstruction_error(X, fit.basis)


def gaussian_trial(config: GaussianExperiment, trial: int) -> TrialOutput:
    rows = []
    for n in config.ns:
        seed = derive_seed(config.seed, trial, n)
        data = gen_gaussian_split(config.dimension, n, config.n_test, seed)
        train = data.train
        if config.contamination_fraction > 0:
            train = corrupt_noise(train, config.contamination_fraction, config.contamination_sigma, seed=seed)

        def score(fit: MethodFit, key: dict) -> dict:
            return {"recon_train": _recon(train, fit), "recon_test": _recon(data.test, fit)}

        rows += _evaluate_methods(config, train, n, seed, {"trial": trial, "seed": seed}, score)
    return TrialOutput(rows)


def mislabel_pool(X: np.ndarray, labels: np.ndarray, n: int, target: str, seed: int) -> tuple[LabeledDataset, np.ndarray]:
    """
    Draw n target-class samples plus every off-class sample as the labeled
    training pool; the remaining target-class samples are held out.
    """
    rng = np.random.default_rng(seed)
    tgt = np.flatnonzero(labels == target)
    if tgt.size <= n:
        raise ValueError(f"only {tgt.size} {target!r} samples; N={n} leaves none held out")
    perm = rng.permutation(tgt)
    off = np.flatnonzero(labels != target)
    idx = np.concatenate([np.sort(perm[:n]), off])
    pool = LabeledDataset(train=X[:, idx], train_labels=labels[idx])
    return pool, np.sort(perm[n:])


def wbcd_trial(config: WbcdExperiment, X: np.ndarray, labels: np.ndarray, trial: int) -> TrialOutput:
    rows = []
    for n in config.ns:
        seed = derive_seed(config.seed, trial, n)
        pool, held_out = mislabel_pool(X, labels, n, config.target, seed)
        data = corrupt_mislabel(pool, config.mislabel_fraction, seed=seed, target=config.target)
        test = X[:, held_out]

        def score(fit: MethodFit, key: dict) -> dict:
            return {"recon_train": _recon(data.train, fit), "recon_test": _recon(test, fit)}

        base = {"trial": trial, "seed": seed, "mislabeled": int(data.corrupted.size)}
        rows += _evaluate_methods(config, data.train, n, seed, base, score)
    return TrialOutput(rows)


def tep_trial(
    config: TepExperiment,
    train_full: np.ndarray,
    test: np.ndarray,
    faulty: np.ndarray,
    trial: int,
) -> TrialOutput:
    rows, curves = [], []
    grid = default_threshold_grid()
    for n in config.ns:
        if n > train_full.shape[1]:
            raise ValueError(f"N={n} exceeds the {train_full.shape[1]} available training samples")
        seed = derive_seed(config.seed, trial, n)
        rng = np.random.default_rng(seed)
        sub = train_full[:, np.sort(rng.choice(train_full.shape[1], size=n, replace=False))]
        train = corrupt_noise(sub, config.noise_fraction, config.noise_sigma, seed=seed)

        def score(fit: MethodFit, key: dict) -> dict:
            if fit.basis is None:
                return {"recon_train": float("nan"), "recon_test": float("nan"),
                        "auroc": float("nan"), "auprc": float("nan")}
            result = roc_prc(spe_scores(test, fit.basis), faulty, grid)
            if config.curves:
                curves.extend({**key, **point} for point in result.to_records())
            return {
                "recon_train": _recon(train, fit),
                "recon_test": _recon(test, fit),
                "auroc": result.auroc,
                "auprc": result.auprc,
            }

        rows += _evaluate_methods(config, train, n, seed, {"trial": trial, "seed": seed}, score)
    return TrialOutput(rows, curves)


def aggregate(trials: pd.DataFrame) -> pd.DataFrame:
    """Mean and standard error of the mean per (method, K, N, ε)"""
    metrics = [c for c in METRIC_COLUMNS if c in trials.columns]
    grouped = trials.groupby(GROUP_COLUMNS, dropna=False, sort=False)
    summary = grouped[metrics].agg(["mean", "sem"])
    summary.columns = [f"{metric}_{stat}" for metric, stat in summary.columns]
    summary.insert(0, "trials", grouped.size())
    return summary.reset_index()


def _collect(name: str, outputs: list[TrialOutput]) -> ExperimentResult:
    trials = pd.DataFrame([row for out in outputs for row in out.rows])
    curve_rows = [row for out in outputs for row in out.curves]
    return ExperimentResult(
        name=name,
        trials=trials,
        aggregate=aggregate(trials),
        curves=pd.DataFrame(curve_rows) if curve_rows else None,
    )


def _check_k(config: ExperimentConfig, dimension: int) -> None:
    smallest = min(dimension, min(config.ns))
    if config.k > smallest:
        raise ValueError(f"K={config.k} exceeds min(D, N)={smallest}")


def run_gaussian(config: GaussianExperiment) -> ExperimentResult:
    _check_k(config, config.dimension)
    logger.info(f"Gaussian experiment: {config.trials} trials, N={config.ns}, eps={config.epsilons}")
    outputs = TrialPool(config.workers).map(partial(gaussian_trial, config), range(config.trials))
    return _collect("gaussian", outputs)


def run_wbcd(config: WbcdExperiment) -> ExperimentResult:
    data = load_csv(config.data_path, WBCD_SCHEMA)
    X = robust_scale(data.train)
    _check_k(config, X.shape[0])
    logger.info(f"WBCD experiment: {X.shape[1]} samples, {config.trials} trials, N={config.ns}")
    trial = partial(wbcd_trial, config, X, data.train_labels)
    return _collect("wbcd", TrialPool(config.workers).map(trial, range(config.trials)))


def load_tep(config: TepExperiment) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Standardized fault-free training data, test data and its fault mask"""
    if config.train_path is None:
        data = gen_fault_toy(
            D=config.dimension,
            n_train=max(config.ns) * 4,
            n_fault_runs=config.fault_runs,
            run_length=config.run_length,
            fault_onset=config.fault_onset,
            seed=config.seed,
        )
        return data.train, data.test, data.test_faulty

    train = load_csv(config.train_path, TEP_SCHEMA)
    test = load_csv(config.test_path, TEP_SCHEMA)
    normal = train.train[:, train.train_labels == TEP_SCHEMA.normal_label]
    faulty = test.faulty_mask(test.train_labels, test.train_index)
    return standardize(normal), standardize(test.train, reference=normal), faulty


def run_tep(config: TepExperiment) -> ExperimentResult:
    train, test, faulty = load_tep(config)
    _check_k(config, train.shape[0])
    logger.info(
        f"TEP experiment: {int((~faulty).sum())} faultless / {int(faulty.sum())} faulty test samples, "
        f"{config.trials} trials"
    )
    trial = partial(tep_trial, config, train, test, faulty)
    return _collect("tep", TrialPool(config.workers).map(trial, range(config.trials)))


EXPERIMENTS: dict[str, tuple[type[ExperimentConfig], Callable[..., ExperimentResult]]] = {
    "gaussian": (GaussianExperiment, run_gaussian),
    "wbcd": (WbcdExperiment, run_wbcd),
    "tep": (TepExperiment, run_tep),
}


def run_experiment(name: str, config: ExperimentConfig) -> ExperimentResult:
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    return EXPERIMENTS[name][1](config)
