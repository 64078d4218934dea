"""Training-set corruption: class mislabeling and additive Gaussian noise"""
import dataclasses
import logging
import math
from typing import Optional

import numpy as np

from src.errors import CorruptionError
from src.evaluation.datasets import LabeledDataset
from src.linalg.core import DataMatrix, as_matrix

logger = logging.getLogger(__name__)


def _check_fraction(fraction: float) -> None:
    if not 0.0 <= fraction <= 1.0:
        raise CorruptionError(f"fraction must lie in [0, 1], got {fraction}")


def corrupt_mislabel(
    data: LabeledDataset,
    fraction: float = 0.2,
    seed: int = 0,
    target: Optional[str] = None,
) -> LabeledDataset:
    """
    Swap ⌈fraction·N⌉ training samples of the target class for samples of
    other classes while keeping the target label on them.

    The returned training set holds only target-labeled samples (N of
    them, N the target-class count); `corrupted` lists the positions that
    now carry another class's data. The test set is left alone.
    """
    _check_fraction(fraction)
    if data.train_labels is None:
        raise CorruptionError("mislabeling needs training labels")
    labels = np.asarray(data.train_labels)
    classes, counts = np.unique(labels, return_counts=True)
    if classes.size < 2:
        raise CorruptionError(f"mislabeling needs at least two classes, found {classes.tolist()}")
    if target is None:
        target = classes[int(np.argmax(counts))]
    if target not in classes:
        raise CorruptionError(f"target class {target!r} not present in training labels")

    pool = np.flatnonzero(labels == target)
    donors = np.flatnonzero(labels != target)
    count = math.ceil(fraction * pool.size - 1e-9)
    if count > donors.size:
        raise CorruptionError(
            f"need {count} off-class samples to mislabel but only {donors.size} are available"
        )

    rng = np.random.default_rng(seed)
    positions = np.sort(rng.choice(pool.size, size=count, replace=False))
    replacements = rng.choice(donors, size=count, replace=False)

    train = data.train[:, pool].copy()
    train[:, positions] = data.train[:, replacements]
    logger.debug(f"Mislabeled {count} of {pool.size} samples as {target!r}")
    return dataclasses.replace(
        data,
        train=train,
        train_labels=np.full(pool.size, target, dtype=labels.dtype),
        train_index=None if data.train_index is None else np.asarray(data.train_index)[pool],
        corrupted=positions,
    )


def noise_columns(n: int, fraction: float, rng: np.random.Generator) -> np.ndarray:
    """floor(fraction·N + 0.5) distinct columns, sorted"""
    _check_fraction(fraction)
    count = int(math.floor(fraction * n + 0.5))
    return np.sort(rng.choice(n, size=count, replace=False))


def corrupt_noise(
    X: DataMatrix,
    fraction: float = 0.2,
    sigma: float = 100.0,
    seed: int = 0,
    return_indices: bool = False,
):
    """Add N(0, σ²) noise to every feature of a random subset of samples"""
    if sigma < 0:
        raise CorruptionError(f"sigma must be nonnegative, got {sigma}")
    A = as_matrix(X).copy()
    rng = np.random.default_rng(seed)
    cols = noise_columns(A.shape[1], fraction, rng)
    A[:, cols] += rng.normal(0.0, sigma, size=(A.shape[0], cols.size))
    if return_indices:
        return A, cols
    return A
