"""Tests for the qapca command line"""
import json

import pandas as pd
import pytest

from src.cli.config import RunConfig
from src.cli.main import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, experiment_config, main
from src.experiments.protocols import EXPERIMENT_RESTARTS


class TestFit:
    @pytest.mark.integration
    def test_toy(self, fixtures_dir, tmp_path):
        out = tmp_path / "fit"
        code = main(["fit", str(fixtures_dir / "toy.csv"), "--solver", "exhaustive", "--out", str(out)])
        assert code == EXIT_OK
        basis = pd.read_csv(out / "basis.csv")
        assert basis["feature"].tolist() == ["x1", "x2"]
        assert basis["r1"].abs().tolist() == pytest.approx([1.0, 0.0], abs=1e-12)
        assignment = pd.read_csv(out / "assignment.csv")
        assert assignment["b1"].tolist() == [1, 1, -1]
        diagnostics = json.loads((out / "diagnostics.json").read_text())
        assert diagnostics["objective"] == pytest.approx(9.0)
        assert diagnostics["kappa"] == 2
        assert (out / "run_config.json").exists()

    @pytest.mark.integration
    @pytest.mark.parametrize("method", ["qapca-r", "l1-bf", "svd"])
    def test_methods(self, fixtures_dir, tmp_path, method):
        out = tmp_path / method
        code = main([
            "fit", str(fixtures_dir / "toy.csv"), "--method", method, "--k", "2",
            "--solver", "exhaustive", "--out", str(out), "--format", "json",
        ])
        assert code == EXIT_OK
        basis = json.loads((out / "basis.json").read_text())
        assert set(basis[0]) == {"feature", "r1", "r2"}

    @pytest.mark.integration
    def test_wbcd_schema(self, fixtures_dir, tmp_path):
        out = tmp_path / "wbcd"
        code = main(["fit", str(fixtures_dir / "wbcd_small.csv"), "--schema", "wbcd", "--method", "svd",
                     "--k", "2", "--out", str(out)])
        assert code == EXIT_OK
        assert len(pd.read_csv(out / "basis.csv")) == 30

    @pytest.mark.integration
    def test_config_replay(self, fixtures_dir, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        toy = str(fixtures_dir / "toy.csv")
        assert main(["fit", toy, "--seed", "11", "--reads", "3", "--out", str(first)]) == EXIT_OK
        replay = ["fit", toy, "--config", str(first / "run_config.json"), "--out", str(second)]
        assert main(replay) == EXIT_OK
        assert pd.read_csv(first / "basis.csv").equals(pd.read_csv(second / "basis.csv"))
        echoed = json.loads((second / "run_config.json").read_text())
        assert echoed["seed"] == 11
        assert echoed["reads"] == 3

    @pytest.mark.unit
    def test_toml_config(self, fixtures_dir, tmp_path):
        config = tmp_path / "run.toml"
        config.write_text('method = "svd"\nformat = "json"\n')
        out = tmp_path / "toml"
        assert main(["fit", str(fixtures_dir / "toy.csv"), "--config", str(config), "--out", str(out)]) == EXIT_OK
        assert (out / "basis.json").exists()

    @pytest.mark.unit
    def test_missing_input(self, tmp_path):
        assert main(["fit", str(tmp_path / "absent.csv")]) == EXIT_USAGE

    @pytest.mark.unit
    def test_missing_config(self, fixtures_dir, tmp_path):
        assert main(["fit", str(fixtures_dir / "toy.csv"), "--config", str(tmp_path / "absent.toml")]) == EXIT_USAGE

    @pytest.mark.unit
    def test_invalid_k(self, fixtures_dir):
        assert main(["fit", str(fixtures_dir / "toy.csv"), "--k", "0"]) == EXIT_USAGE

    @pytest.mark.unit
    def test_several_epsilons(self, fixtures_dir, tmp_path):
        code = main(["fit", str(fixtures_dir / "toy.csv"), "--epsilon", "1", "2", "--out", str(tmp_path)])
        assert code == EXIT_USAGE

    @pytest.mark.unit
    def test_malformed_csv(self, fixtures_dir, tmp_path):
        assert main(["fit", str(fixtures_dir / "ragged.csv"), "--out", str(tmp_path)]) == EXIT_RUNTIME


class TestExperiment:
    @pytest.mark.integration
    @pytest.mark.slow
    def test_gaussian_smoke(self, tmp_path):
        out = tmp_path / "gaussian"
        code = main([
            "experiment", "gaussian", "--trials", "5", "--n", "12", "--k", "2",
            "--solver", "exhaustive", "--out", str(out),
        ])
        assert code == EXIT_OK
        trials = pd.read_csv(out / "gaussian_trials.csv")
        assert len(trials) == 20
        assert {"seed", "method", "K", "N", "epsilon", "recon_test", "avg_rank"} <= set(trials.columns)
        assert (out / "gaussian_summary.csv").exists()
        assert json.loads((out / "run_config.json").read_text())["trials"] == 5

    @pytest.mark.unit
    def test_unknown_experiment(self):
        assert main(["experiment", "mnist"]) == EXIT_USAGE

    @pytest.mark.unit
    def test_wbcd_needs_data(self, tmp_path):
        assert main(["experiment", "wbcd", "--out", str(tmp_path)]) == EXIT_USAGE

    @pytest.mark.unit
    def test_wbcd_missing_file(self, tmp_path):
        assert main(["experiment", "wbcd", "--data", str(tmp_path / "absent.csv")]) == EXIT_USAGE

    @pytest.mark.unit
    def test_unknown_method(self, tmp_path):
        assert main(["experiment", "gaussian", "--methods", "pca", "--out", str(tmp_path)]) == EXIT_USAGE

    @pytest.mark.unit
    def test_l1bf_restarts_default_per_command(self):
        assert RunConfig().l1bf_config().restarts == 1
        protocol = experiment_config("gaussian", RunConfig())
        assert protocol.l1bf.restarts == EXPERIMENT_RESTARTS == 32
        assert experiment_config("gaussian", RunConfig(restarts=3)).l1bf.restarts == 3


class TestEmbed:
    @pytest.mark.integration
    def test_full_triangle(self, capsys):
        assert main(["embed", "150", "--band-climit", "11325"]) == EXIT_OK
        summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert summary["kappa"] == 149
        assert summary["coupler_count"] == 11325
        assert "layout" not in summary

    @pytest.mark.integration
    def test_second_call_hits_store(self, capsys):
        main(["embed", "64", "--k", "2", "--band-climit", "4000"])
        capsys.readouterr()
        assert main(["embed", "64", "--k", "2", "--band-climit", "4000"]) == EXIT_OK
        summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert summary["from_store"] is True
        assert summary["K"] == 2

    @pytest.mark.integration
    def test_writes_layout(self, tmp_path, capsys):
        assert main(["embed", "10", "--out", str(tmp_path), "--refresh"]) == EXIT_OK
        written = json.loads((tmp_path / "embedding_N10_K1.json").read_text())
        assert written["layout"]["N"] == 10
        assert written["from_store"] is False

    @pytest.mark.unit
    def test_infeasible(self):
        assert main(["embed", "2", "--band-climit", "1"]) == EXIT_RUNTIME
