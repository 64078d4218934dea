"""Tests for experiment protocols and the trial pool"""
import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from src.evaluation.detection import default_threshold_grid
from src.experiments.protocols import (
    GaussianExperiment, TepExperiment, WbcdExperiment, aggregate, derive_seed, fit_method, load_tep,
    run_experiment,
)
from src.experiments.worker import TrialPool
from src.ising.problem import SolverKind
from src.qapca.models import QapcaConfig


def square(x: int) -> int:
    return x * x


@pytest.fixture
def gaussian() -> GaussianExperiment:
    return GaussianExperiment(
        trials=3,
        ns=[8],
        k=2,
        epsilons=[0.0, 100.0],
        dimension=4,
        n_test=20,
        qapca=QapcaConfig(solver=SolverKind.EXHAUSTIVE),
    )


@pytest.fixture
def wbcd_csv(tmp_path, rng):
    rows = ["id,diagnosis," + ",".join(f"f{i}" for i in range(1, 6))]
    for index in range(55):
        label = "B" if index < 40 else "M"
        shift = 0.0 if label == "B" else 3.0
        values = rng.normal(shift, 1.0, 5)
        rows.append(f"{9000 + index},{label}," + ",".join(f"{v:.6f}" for v in values))
    path = tmp_path / "wbcd.csv"
    path.write_text("\n".join(rows) + "\n")
    return path


class TestTrialPool:
    @pytest.mark.unit
    def test_serial_order(self):
        assert TrialPool(1).map(square, range(5)) == [0, 1, 4, 9, 16]

    @pytest.mark.integration
    def test_processes_keep_order(self):
        assert TrialPool(2).map(square, range(6)) == [0, 1, 4, 9, 16, 25]

    @pytest.mark.unit
    def test_rejects_zero_workers(self):
        with pytest.raises(ValueError):
            TrialPool(0)


class TestConfig:
    @pytest.mark.unit
    def test_unknown_method(self):
        with pytest.raises(ValidationError):
            GaussianExperiment(methods=["pca"])

    @pytest.mark.unit
    def test_small_n(self):
        with pytest.raises(ValidationError):
            GaussianExperiment(ns=[1])

    @pytest.mark.unit
    def test_negative_epsilon(self):
        with pytest.raises(ValidationError):
            GaussianExperiment(epsilons=[-1.0])

    @pytest.mark.unit
    def test_tep_paths_together(self, fixtures_dir):
        with pytest.raises(ValidationError):
            TepExperiment(train_path=fixtures_dir / "tep_small.csv")

    @pytest.mark.unit
    def test_default_components(self):
        assert GaussianExperiment().k == 4

    @pytest.mark.unit
    def test_derive_seed(self):
        assert derive_seed(0, 1, 20) == derive_seed(0, 1, 20)
        assert len({derive_seed(0, trial, 20) for trial in range(50)}) == 50
        assert derive_seed(0, 1, 20) != derive_seed(1, 1, 20)


class TestFitMethod:
    @pytest.mark.unit
    def test_degenerate_falls_back_to_column_space(self, toy_X, gaussian):
        fit = fit_method("qapca", toy_X, 2, 100.0, gaussian, seed=0)
        assert fit.status == "degenerate"
        assert fit.basis.shape == (2, 1)
        assert fit.objective == pytest.approx(18.0)

    @pytest.mark.unit
    def test_svd(self, toy_X, gaussian):
        fit = fit_method("svd", toy_X, 1, float("nan"), gaussian, seed=0)
        assert fit.status == "ok"
        assert fit.assignment is None


class TestAggregate:
    @pytest.mark.unit
    def test_mean_and_sem(self):
        trials = pd.DataFrame({
            "method": ["svd", "svd", "qapca"],
            "K": [2, 2, 2],
            "N": [8, 8, 8],
            "epsilon": [np.nan, np.nan, 100.0],
            "recon_test": [1.0, 3.0, 0.5],
        })
        summary = aggregate(trials).set_index("method")
        assert summary.loc["svd", "trials"] == 2
        assert summary.loc["svd", "recon_test_mean"] == pytest.approx(2.0)
        assert summary.loc["svd", "recon_test_sem"] == pytest.approx(1.0)
        assert summary.loc["qapca", "recon_test_mean"] == pytest.approx(0.5)


class TestGaussian:
    @pytest.mark.integration
    def test_rows(self, gaussian):
        result = run_experiment("gaussian", gaussian)
        assert len(result.trials) == 3 * 5
        assert set(result.trials["method"]) == {"qapca", "qapca-r", "l1-bf", "svd"}
        assert result.trials.loc[result.trials["method"] != "qapca", "epsilon"].isna().all()
        assert set(result.trials["status"]) <= {"ok", "degenerate"}
        assert len(result.aggregate) == 5
        assert (result.aggregate["trials"] == 3).all()
        assert result.trials["recon_test"].between(0.0, 1.0).all()

    @pytest.mark.integration
    def test_svd_has_lowest_train_error(self, gaussian):
        trials = run_experiment("gaussian", gaussian).trials
        best = trials.groupby("trial")["recon_train"].min()
        svd = trials[trials["method"] == "svd"].set_index("trial")["recon_train"]
        assert np.allclose(svd.loc[best.index], best)

    @pytest.mark.integration
    def test_workers_do_not_change_results(self, gaussian):
        serial = run_experiment("gaussian", gaussian).trials.drop(columns="elapsed_s")
        parallel = run_experiment("gaussian", gaussian.model_copy(update={"workers": 2})).trials
        pd.testing.assert_frame_equal(serial, parallel.drop(columns="elapsed_s"))

    @pytest.mark.integration
    def test_write(self, gaussian, tmp_path):
        result = run_experiment("gaussian", gaussian)
        paths = result.write(tmp_path, "json")
        assert sorted(p.name for p in paths) == ["gaussian_summary.json", "gaussian_trials.json"]

    @pytest.mark.unit
    def test_k_above_dimension(self, gaussian):
        with pytest.raises(ValueError):
            run_experiment("gaussian", gaussian.model_copy(update={"k": 5}))


class TestWbcd:
    @pytest.mark.integration
    def test_rows(self, wbcd_csv):
        config = WbcdExperiment(
            data_path=wbcd_csv,
            trials=2,
            ns=[10],
            k=2,
            methods=["qapca-r", "l1-bf", "svd"],
            qapca=QapcaConfig(solver=SolverKind.EXHAUSTIVE),
        )
        result = run_experiment("wbcd", config)
        assert len(result.trials) == 2 * 3
        assert (result.trials["mislabeled"] == 2).all()
        assert result.trials["recon_test"].notna().all()

    @pytest.mark.unit
    def test_pool_too_small(self, wbcd_csv):
        config = WbcdExperiment(data_path=wbcd_csv, trials=1, ns=[40], k=2, methods=["svd"])
        with pytest.raises(ValueError):
            run_experiment("wbcd", config)


class TestTep:
    @pytest.fixture
    def tep(self) -> TepExperiment:
        return TepExperiment(
            trials=2,
            ns=[20],
            k=2,
            methods=["l1-bf", "svd"],
            dimension=6,
            fault_runs=2,
            run_length=50,
            fault_onset=30,
        )

    @pytest.mark.integration
    def test_synthetic(self, tep):
        result = run_experiment("tep", tep)
        assert len(result.trials) == 2 * 2
        assert result.trials["auroc"].between(0.0, 1.0).all()
        assert result.trials["auprc"].between(0.0, 1.0).all()
        assert len(result.curves) == 2 * 2 * len(default_threshold_grid())
        assert {"threshold", "fpr", "tpr", "precision", "method"} <= set(result.curves.columns)

    @pytest.mark.integration
    def test_no_curves(self, tep):
        result = run_experiment("tep", tep.model_copy(update={"curves": False}))
        assert result.curves is None

    @pytest.mark.unit
    def test_load_from_csv(self, fixtures_dir):
        path = fixtures_dir / "tep_small.csv"
        train, test, faulty = load_tep(TepExperiment(train_path=path, test_path=path))
        assert train.shape == (3, 2)
        assert test.shape == (3, 6)
        assert faulty.tolist() == [False, False, False, False, True, True]

    @pytest.mark.unit
    def test_n_above_training_pool(self, fixtures_dir):
        path = fixtures_dir / "tep_small.csv"
        config = TepExperiment(train_path=path, test_path=path, ns=[5], k=1, methods=["svd"], trials=1)
        with pytest.raises(ValueError):
            run_experiment("tep", config)


class TestRunExperiment:
    @pytest.mark.unit
    def test_unknown(self, gaussian):
        with pytest.raises(ValueError):
            run_experiment("mnist", gaussian)
