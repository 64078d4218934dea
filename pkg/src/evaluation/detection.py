"""Threshold-based fault detection rates and ROC/PRC curves"""
import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import trapezoid

from src.errors import InvalidCountsError

logger = logging.getLogger(__name__)

# (start, stop, step) segments of the default threshold sweep
DEFAULT_SEGMENTS = (
    (0.0, 1e-4, 1e-5),
    (1e-4, 1e-3, 1e-4),
    (1e-3, 0.5, 1e-3),
    (0.5, 5.0, 1e-2),
    (5.0, 300.0, 1.0),
    (300.0, 1000.0, 100.0),
    (1000.0, 1e4, 1000.0),
)


@dataclass(frozen=True)
class DetectionCounts:
    """Detection tallies; faulty samples flagged are true positives"""
    n_faultless: int
    n_faulty: int
    false_alarms: int
    detections: int

    def __post_init__(self):
        if min(self.n_faultless, self.n_faulty, self.false_alarms, self.detections) < 0:
            raise InvalidCountsError(f"counts must be nonnegative: {self}")
        if self.false_alarms > self.n_faultless or self.detections > self.n_faulty:
            raise InvalidCountsError(f"flagged counts exceed population counts: {self}")


class DetectionRates(NamedTuple):
    fpr: float
    tpr: float
    precision: float


def detection_rates(counts: DetectionCounts) -> DetectionRates:
    """
    FPR = N_fa / N_faultless, TPR = N_d / N_faulty,
    precision = N_d / (N_d + N_fa), taken as 1 when nothing is flagged.
    """
    if counts.n_faultless == 0 or counts.n_faulty == 0:
        raise InvalidCountsError(
            f"rates need both classes present, got {counts.n_faultless} faultless "
            f"and {counts.n_faulty} faulty samples"
        )
    flagged = counts.detections + counts.false_alarms
    return DetectionRates(
        fpr=counts.false_alarms / counts.n_faultless,
        tpr=counts.detections / counts.n_faulty,
        precision=1.0 if flagged == 0 else counts.detections / flagged,
    )


def detection_counts(scores, is_faulty, threshold: float) -> DetectionCounts:
    """A sample is flagged when its score exceeds the threshold"""
    s = np.asarray(scores, dtype=float)
    faulty = np.asarray(is_faulty, dtype=bool)
    flagged = s > threshold
    return DetectionCounts(
        n_faultless=int(np.sum(~faulty)),
        n_faulty=int(np.sum(faulty)),
        false_alarms=int(np.sum(flagged & ~faulty)),
        detections=int(np.sum(flagged & faulty)),
    )


@dataclass(frozen=True)
class ThresholdGrid:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("threshold grid must be a non-empty 1-D sequence")
        if np.any(np.diff(v) <= 0):
            raise ValueError("threshold grid must be strictly increasing")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return int(self.values.size)

    @classmethod
    def from_segments(cls, segments) -> "ThresholdGrid":
        """Concatenate evenly spaced segments, dropping shared endpoints"""
        parts = []
        for start, stop, step in segments:
            count = int(round((stop - start) / step)) + 1
            seg = np.linspace(start, stop, count)
            if parts and np.isclose(seg[0], parts[-1][-1]):
                seg = seg[1:]
            parts.append(seg)
        return cls(np.concatenate(parts))


def default_threshold_grid() -> ThresholdGrid:
    """The default multi-decade sweep from 0 to 10⁴"""
    return ThresholdGrid.from_segments(DEFAULT_SEGMENTS)


@dataclass(frozen=True)
class DetectionCurves:
    """Rates at each threshold plus ROC and PR areas"""
    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray
    precision: np.ndarray
    auroc: float
    auprc: float

    def to_records(self) -> list[dict]:
        return [
            {"threshold": float(t), "fpr": float(f), "tpr": float(r), "precision": float(p)}
            for t, f, r, p in zip(self.thresholds, self.fpr, self.tpr, self.precision)
        ]


def _flagged_counts(sorted_scores: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """Number of scores strictly above each threshold"""
    return sorted_scores.size - np.searchsorted(sorted_scores, thresholds, side="right")


def roc_prc(scores, is_faulty, grid: ThresholdGrid | None = None) -> DetectionCurves:
    """
    Sweep the grid and integrate by the trapezoid rule.

    ROC points are ordered by FPR and anchored at (0, 0) and (1, 1); PR
    points are taken from the highest threshold down.
    """
    grid = default_threshold_grid() if grid is None else grid
    s = np.asarray(scores, dtype=float)
    faulty = np.asarray(is_faulty, dtype=bool)
    if s.shape != faulty.shape:
        raise ValueError(f"scores {s.shape} and labels {faulty.shape} differ in shape")
    n_faulty = int(faulty.sum())
    n_faultless = int(faulty.size - n_faulty)
    if n_faulty == 0 or n_faultless == 0:
        raise InvalidCountsError(
            f"curves need both classes present, got {n_faultless} faultless and {n_faulty} faulty samples"
        )

    t = grid.values
    detections = _flagged_counts(np.sort(s[faulty]), t)
    false_alarms = _flagged_counts(np.sort(s[~faulty]), t)
    fpr = false_alarms / n_faultless
    tpr = detections / n_faulty
    flagged = detections + false_alarms
    precision = np.where(flagged == 0, 1.0, detections / np.maximum(flagged, 1))

    roc_x = np.concatenate([[0.0], fpr, [1.0]])
    roc_y = np.concatenate([[0.0], tpr, [1.0]])
    order = np.lexsort((roc_y, roc_x))
    auroc = float(trapezoid(roc_y[order], roc_x[order]))

    # recall is nondecreasing as the threshold falls
    auprc = float(trapezoid(precision[::-1], tpr[::-1]))

    logger.debug(f"Swept {len(grid)} thresholds: AUROC={auroc:.4f}, AUPRC={auprc:.4f}")
    return DetectionCurves(
        thresholds=t,
        fpr=fpr,
        tpr=tpr,
        precision=precision,
        auroc=auroc,
        auprc=auprc,
    )
