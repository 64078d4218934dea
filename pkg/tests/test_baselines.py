"""Tests for the L2-PCA and L1-BF baselines"""
import numpy as np
import pytest
from scipy.linalg import subspace_angles

from src.baselines.pca import L1bfConfig, l1_bf, l2_pca
from src.errors import DegenerateComponentsError, RankDeficientError
from tests.helpers import brute_force_l1, projector


class TestL2Pca:
    @pytest.mark.unit
    def test_matches_eigenvectors(self, rng):
        X = rng.normal(size=(4, 30))
        R = l2_pca(X, 2)
        _, vectors = np.linalg.eigh(X @ X.T)
        assert np.allclose(projector(R), projector(vectors[:, ::-1][:, :2]), atol=1e-10)

    @pytest.mark.unit
    def test_k_bounds(self, rng):
        X = rng.normal(size=(3, 4))
        with pytest.raises(ValueError):
            l2_pca(X, 0)
        with pytest.raises(ValueError):
            l2_pca(X, 4)

    @pytest.mark.unit
    def test_rank_deficient(self):
        X = np.outer([1.0, 2.0, 3.0], [1.0, -1.0, 2.0])
        with pytest.raises(RankDeficientError) as info:
            l2_pca(X, 2)
        assert info.value.rank == 1

    @pytest.mark.unit
    def test_beats_random_subspaces(self, rng):
        X = rng.normal(size=(6, 20))
        R = l2_pca(X, 2)
        best = np.linalg.norm(X - projector(R) @ X)
        for _ in range(100):
            G, _ = np.linalg.qr(rng.normal(size=(6, 2)))
            assert best <= np.linalg.norm(X - projector(G) @ X) + 1e-10


class TestL1bf:
    @pytest.mark.unit
    def test_toy(self, toy_X):
        result = l1_bf(toy_X, 1)
        assert abs(result.basis[:, 0]) == pytest.approx([1.0, 0.0], abs=1e-12)
        assert result.objective == pytest.approx(9.0)

    @pytest.mark.unit
    def test_single_component_near_optimum(self, rng):
        hits = 0
        for _ in range(100):
            X = rng.normal(size=(3, 8))
            _, best = brute_force_l1(X)
            result = l1_bf(X, 1, L1bfConfig(restarts=8))
            assert np.sqrt(result.objective) <= best * (1 + 1e-12)
            hits += np.isclose(np.sqrt(result.objective), best)
        assert hits >= 95

    @pytest.mark.unit
    def test_history_increases(self, rng):
        X = rng.normal(size=(5, 12))
        result = l1_bf(X, 3, L1bfConfig(restarts=3, seed=5))
        history = np.array(result.history)
        assert np.all(np.diff(history) > 0)
        assert result.objective == pytest.approx(history[-1] ** 2)

    @pytest.mark.unit
    def test_orthonormal_basis(self, rng):
        X = rng.normal(size=(5, 12))
        result = l1_bf(X, 3)
        assert np.allclose(result.basis.T @ result.basis, np.eye(3), atol=1e-10)

    @pytest.mark.unit
    def test_threads_match_serial(self, rng):
        X = rng.normal(size=(4, 10))
        serial = l1_bf(X, 2, L1bfConfig(restarts=4, seed=3))
        threaded = l1_bf(X, 2, L1bfConfig(restarts=4, seed=3, workers=3))
        assert serial.restart == threaded.restart
        assert np.array_equal(serial.assignment.B, threaded.assignment.B)

    @pytest.mark.unit
    def test_flip_cap(self, rng):
        X = rng.normal(size=(4, 10))
        result = l1_bf(X, 2, L1bfConfig(max_flips=1))
        assert len(result.history) <= 2

    @pytest.mark.unit
    def test_degenerate(self):
        X = np.outer([1.0, 0.0], [1.0, 2.0, 3.0])
        with pytest.raises(DegenerateComponentsError) as info:
            l1_bf(X, 2)
        assert info.value.rank == 1

    @pytest.mark.unit
    def test_agrees_with_l2_on_clean_data(self, rng):
        angles = []
        for _ in range(10):
            directions, _ = np.linalg.qr(rng.normal(size=(6, 2)))
            X = directions @ np.diag([5.0, 3.0]) @ rng.normal(size=(2, 40)) + 0.1 * rng.normal(size=(6, 40))
            angles.append(subspace_angles(l1_bf(X, 2).basis, l2_pca(X, 2)).max())
        assert np.mean(angles) <= 0.1
