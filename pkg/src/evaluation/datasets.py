"""Labeled datasets, synthetic generators and robust scaling"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg as sla

from src.linalg.core import DataMatrix, as_matrix

logger = logging.getLogger(__name__)

COMMON_MODE_BIAS = -9.0


@dataclass
class LabeledDataset:
    """
    Train/test sample matrices (D × N, samples in columns) with optional
    per-sample labels and run-relative sample numbers.
    """
    train: DataMatrix
    test: Optional[DataMatrix] = None
    train_labels: Optional[np.ndarray] = None
    test_labels: Optional[np.ndarray] = None
    train_index: Optional[np.ndarray] = None
    test_index: Optional[np.ndarray] = None
    fault_onset: Optional[int] = None
    normal_label: Optional[str] = None
    corrupted: Optional[np.ndarray] = None
    feature_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.test is not None and self.test.shape[1] and self.test.shape[0] != self.train.shape[0]:
            raise ValueError(
                f"train has D={self.train.shape[0]} features but test has D={self.test.shape[0]}"
            )

    @property
    def dimension(self) -> int:
        return int(self.train.shape[0])

    def faulty_mask(self, labels: np.ndarray, index: Optional[np.ndarray]) -> np.ndarray:
        """Samples from faulty runs after the onset count as faulty"""
        if self.normal_label is None:
            raise ValueError("dataset has no normal label")
        faulty = np.asarray(labels) != self.normal_label
        if self.fault_onset is not None and index is not None:
            faulty &= np.asarray(index) > self.fault_onset
        return faulty

    @property
    def test_faulty(self) -> np.ndarray:
        return self.faulty_mask(self.test_labels, self.test_index)


def standardize(X: DataMatrix, reference: Optional[DataMatrix] = None) -> DataMatrix:
    """Zero mean, unit (population) standard deviation per feature"""
    A = as_matrix(X)
    ref = A if reference is None else as_matrix(reference)
    mean = ref.mean(axis=1, keepdims=True)
    std = ref.std(axis=1, keepdims=True)
    std[std == 0.0] = 1.0
    return (A - mean) / std


def repair_covariance(C: np.ndarray) -> np.ndarray:
    """Symmetrize and clip negative eigenvalues to zero"""
    S = 0.5 * (C + C.T)
    lam, Q = sla.eigh(S)
    repaired = (Q * np.clip(lam, 0.0, None)) @ Q.T
    return 0.5 * (repaired + repaired.T)


def gaussian_sources(D: int, rng: np.random.Generator) -> list[tuple[np.ndarray, np.ndarray]]:
    """
    Three Gaussians with mean and covariance entries uniform on [-1, 1];
    the third covariance is biased by -9 per entry before repair.
    """
    sources = []
    for index in range(3):
        mean = rng.uniform(-1.0, 1.0, D)
        cov = rng.uniform(-1.0, 1.0, (D, D))
        if index == 2:
            cov = cov + COMMON_MODE_BIAS
        sources.append((mean, repair_covariance(cov)))
    return sources


def draw_superposition(sources, n: int, rng: np.random.Generator) -> DataMatrix:
    """Each sample is the sum of one draw from every source"""
    total = None
    for mean, cov in sources:
        draw = rng.multivariate_normal(mean, cov, size=n, method="eigh", check_valid="ignore")
        total = draw if total is None else total + draw
    return total.T


def gen_gaussian_toy(D: int = 50, N: int = 20, seed: int = 0) -> DataMatrix:
    """Standardized superposition of the three Gaussian sources"""
    if N < 2:
        raise ValueError(f"need at least 2 samples, got N={N}")
    rng = np.random.default_rng(seed)
    return standardize(draw_superposition(gaussian_sources(D, rng), N, rng))


def gen_gaussian_split(D: int, n_train: int, n_test: int, seed: int) -> LabeledDataset:
    """Train and held-out test from the same sources, scaled by training statistics"""
    if n_train < 2 or n_test < 1:
        raise ValueError(f"need n_train >= 2 and n_test >= 1, got {n_train}, {n_test}")
    rng = np.random.default_rng(seed)
    X = draw_superposition(gaussian_sources(D, rng), n_train + n_test, rng)
    train, test = X[:, :n_train], X[:, n_train:]
    return LabeledDataset(train=standardize(train), test=standardize(test, reference=train))


def gen_fault_toy(
    D: int = 10,
    n_train: int = 100,
    n_fault_runs: int = 3,
    run_length: int = 200,
    fault_onset: int = 160,
    latent_dim: int = 3,
    shift: float = 3.0,
    noise: float = 0.1,
    seed: int = 0,
) -> LabeledDataset:
    """
    Desk-scale stand-in for process fault data.

    Normal operation is a latent-factor process x = L z + e. The test set
    holds one normal run (label "0") and n_fault_runs faulty runs (labels
    "1", "2", ...) whose samples after fault_onset carry a mean shift along
    a run-specific random direction. Samples are numbered 1..run_length.
    """
    rng = np.random.default_rng(seed)
    L = rng.normal(size=(D, latent_dim))

    def normal(n: int) -> np.ndarray:
        return L @ rng.normal(size=(latent_dim, n)) + noise * rng.normal(size=(D, n))

    train = normal(n_train)
    runs, labels, index = [], [], []
    for run in range(n_fault_runs + 1):
        X = normal(run_length)
        if run > 0:
            direction = rng.normal(size=D)
            direction /= np.linalg.norm(direction)
            X[:, fault_onset:] += shift * direction[:, None]
        runs.append(X)
        labels.extend([str(run)] * run_length)
        index.append(np.arange(1, run_length + 1))

    test = np.concatenate(runs, axis=1)
    return LabeledDataset(
        train=standardize(train),
        test=standardize(test, reference=train),
        test_labels=np.asarray(labels),
        test_index=np.concatenate(index),
        fault_onset=fault_onset,
        normal_label="0",
    )


def robust_scale(X: DataMatrix, reference: Optional[DataMatrix] = None) -> DataMatrix:
    """
    Center each feature on its median and divide by half the interquartile
    range (linear-interpolation quartiles). Zero-IQR features are only
    centered.
    """
    A = as_matrix(X)
    ref = A if reference is None else as_matrix(reference)
    if ref.shape[1] < 4:
        raise ValueError(f"robust scaling needs at least 4 samples, got {ref.shape[1]}")
    q1, median, q3 = np.percentile(ref, [25.0, 50.0, 75.0], axis=1, method="linear")
    half_iqr = 0.5 * (q3 - q1)
    half_iqr[half_iqr == 0.0] = 1.0
    return (A - median[:, None]) / half_iqr[:, None]

