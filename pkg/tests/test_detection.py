"""Tests for detection rates and ROC/PRC sweeps"""
import numpy as np
import pytest

from src.errors import InvalidCountsError
from src.evaluation.detection import (
    DetectionCounts, ThresholdGrid, detection_counts, detection_rates, default_threshold_grid, roc_prc,
)


class TestRates:
    @pytest.mark.unit
    def test_rates(self):
        rates = detection_rates(DetectionCounts(n_faultless=100, n_faulty=50, false_alarms=10, detections=40))
        assert rates.fpr == pytest.approx(0.1)
        assert rates.tpr == pytest.approx(0.8)
        assert rates.precision == pytest.approx(0.8)

    @pytest.mark.unit
    def test_precision_when_nothing_flagged(self):
        rates = detection_rates(DetectionCounts(n_faultless=10, n_faulty=5, false_alarms=0, detections=0))
        assert rates == (0.0, 0.0, 1.0)

    @pytest.mark.unit
    def test_inconsistent_counts(self):
        with pytest.raises(InvalidCountsError):
            DetectionCounts(n_faultless=5, n_faulty=5, false_alarms=6, detections=0)
        with pytest.raises(InvalidCountsError):
            DetectionCounts(n_faultless=5, n_faulty=5, false_alarms=0, detections=-1)

    @pytest.mark.unit
    def test_empty_population(self):
        with pytest.raises(InvalidCountsError):
            detection_rates(DetectionCounts(n_faultless=0, n_faulty=5, false_alarms=0, detections=2))

    @pytest.mark.unit
    def test_flagging_is_strict(self):
        counts = detection_counts([1.0, 2.0, 2.0, 3.0], [False, False, True, True], threshold=2.0)
        assert counts == DetectionCounts(n_faultless=2, n_faulty=2, false_alarms=0, detections=1)


class TestThresholdGrid:
    @pytest.mark.unit
    def test_default_grid(self):
        grid = default_threshold_grid()
        assert len(grid) == 1280
        assert grid.values[0] == 0.0
        assert grid.values[-1] == pytest.approx(1e4)
        assert np.all(np.diff(grid.values) > 0)

    @pytest.mark.unit
    def test_segments_share_endpoints(self):
        grid = ThresholdGrid.from_segments([(0.0, 1.0, 0.5), (1.0, 3.0, 1.0)])
        assert grid.values.tolist() == [0.0, 0.5, 1.0, 2.0, 3.0]

    @pytest.mark.unit
    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            ThresholdGrid(np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            ThresholdGrid(np.array([]))


class TestRocPrc:
    @pytest.mark.unit
    def test_separable(self):
        scores = np.array([0.5] * 100 + [10.0] * 50)
        faulty = np.array([False] * 100 + [True] * 50)
        curves = roc_prc(scores, faulty)
        assert curves.auroc == pytest.approx(1.0)
        assert curves.auprc == pytest.approx(1.0)

    @pytest.mark.unit
    def test_random_scores(self, rng):
        scores = rng.uniform(0.0, 10.0, 4000)
        faulty = rng.random(4000) < 0.5
        assert roc_prc(scores, faulty).auroc == pytest.approx(0.5, abs=0.05)

    @pytest.mark.unit
    def test_single_threshold(self):
        scores = np.array([0.0, 2.0, 2.0, 2.0, 0.0, 3.0])
        faulty = np.array([False, False, True, True, True, True])
        curves = roc_prc(scores, faulty, ThresholdGrid(np.array([1.0])))
        assert curves.fpr.tolist() == [0.5]
        assert curves.tpr.tolist() == [0.75]
        assert curves.auroc == pytest.approx(0.625)

    @pytest.mark.unit
    def test_rates_monotone_in_threshold(self, rng):
        scores = rng.exponential(2.0, 300)
        faulty = rng.random(300) < 0.3
        curves = roc_prc(scores, faulty)
        assert np.all(np.diff(curves.fpr) <= 0)
        assert np.all(np.diff(curves.tpr) <= 0)
        assert 0.0 <= curves.auprc <= 1.0

    @pytest.mark.unit
    def test_records(self):
        curves = roc_prc([0.0, 1.0], [False, True], ThresholdGrid(np.array([0.5, 2.0])))
        records = curves.to_records()
        assert records[0] == {"threshold": 0.5, "fpr": 0.0, "tpr": 1.0, "precision": 1.0}
        assert len(records) == 2

    @pytest.mark.unit
    def test_needs_both_classes(self):
        with pytest.raises(InvalidCountsError):
            roc_prc([1.0, 2.0], [True, True])

    @pytest.mark.unit
    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            roc_prc([1.0, 2.0], [True])

    @pytest.mark.unit
    @pytest.mark.parametrize("transform", [np.exp, lambda s: s**3 + s])
    def test_auroc_ignores_increasing_transforms(self, rng, transform):
        scores = np.concatenate([rng.uniform(0.0, 0.7, 500), rng.uniform(0.3, 1.0, 500)])
        faulty = np.arange(1000) >= 500
        grid = ThresholdGrid(np.linspace(-0.1, 3.0, 62001))
        base = roc_prc(scores, faulty, grid).auroc
        assert roc_prc(transform(scores), faulty, grid).auroc == pytest.approx(base, abs=1e-3)
