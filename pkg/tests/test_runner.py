"""
Experiment Runner Test Suite
- Seed streams and state draws
- Error classification and exit codes
- End-to-end runs writing CSV and summary files
- CLI behaviour
"""
import json

import numpy as np
import pandas as pd
import pytest

from main import main
from tomochaos.config import default_config, parse_config
from tomochaos.ensembles import dephased_entropy_prediction
from tomochaos.runner import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_RUNTIME,
    classify_error,
    describe_error,
    draw_states,
    predict_sample,
    run_experiment,
    task_seed,
)
from tomochaos.state import (
    ConfigError,
    DynamicsKind,
    DynamicsSpec,
    EnsembleKind,
    NoInformationError,
    RuntimeSettings,
)
from tomochaos.storage import ResultStore
from tomochaos.tomography import KICK_COLUMNS


def small_config(**fields):
    document = {"j": 1, "seed": 7}
    document.update(fields)
    return parse_config(json.dumps(document))


class TestSeeding:
    """Test reproducible seed streams"""

    def test_task_seed_deterministic(self):
        """Test that task seeds depend only on master seed and index"""
        assert task_seed(3, 0) == task_seed(3, 0)
        assert task_seed(3, 0) != task_seed(3, 1)
        assert task_seed(3, 0) != task_seed(4, 0)

    def test_draw_states(self):
        """Test the shape and normalisation of drawn states"""
        states = draw_states(21, 5, master=2)
        assert len(states) == 5
        for psi in states:
            assert np.linalg.norm(psi) == pytest.approx(1.0)
        again = draw_states(21, 3, master=2)
        np.testing.assert_array_equal(states[1], again[1])

    def test_predict_sample_keys(self):
        """Test the keys of one ensemble prediction"""
        sample = predict_sample(DynamicsSpec(kind=DynamicsKind.COE, j=2), seed=1)
        assert set(sample) == {"entropy", "rank", "n_nonzero_terms", "degenerate"}
        assert 0.0 < sample["entropy"] <= np.log(24) + 1e-9


class TestErrorHandling:
    """Test error classification"""

    def test_config_error(self):
        """Test the CONFIG error category"""
        assert classify_error(ConfigError("bad", field="j")) == ("CONFIG", EXIT_CONFIG)

    def test_output_error(self):
        """Test the OUTPUT error category"""
        assert classify_error(PermissionError("denied")) == ("OUTPUT", EXIT_RUNTIME)

    def test_numerical_error(self):
        """Test the NUMERICAL error category"""
        assert classify_error(NoInformationError("empty")) == ("NUMERICAL", EXIT_RUNTIME)
        assert classify_error(np.linalg.LinAlgError("svd")) == ("NUMERICAL", EXIT_RUNTIME)

    def test_general_error(self):
        """Test the GENERAL error category"""
        assert classify_error(RuntimeError("boom")) == ("GENERAL", EXIT_RUNTIME)

    def test_describe_hides_details_without_debug(self):
        """Test that error details are hidden outside debug mode"""
        details = describe_error(RuntimeError("boom"))
        assert details["technical_details"] is None
        assert details["exit_code"] == str(EXIT_RUNTIME)
        assert "boom" not in details["message"]

    def test_describe_shows_details_in_debug(self):
        """Test that debug mode shows the offending field"""
        details = describe_error(ConfigError("must be >= 1", field="n_kicks"), debug_mode=True)
        assert "n_kicks" in details["message"]
        assert "ConfigError" in details["technical_details"]

    def test_run_rejects_bad_overrides(self, tmp_path):
        """Test that invalid overrides raise ConfigError"""
        config = small_config(experiment="AnalyticTable")
        with pytest.raises(ConfigError):
            run_experiment(config, workers=0, out=str(tmp_path))
        with pytest.raises(ConfigError):
            run_experiment(config, seed=-1, out=str(tmp_path))


class TestExperiments:
    """Test end-to-end runs at small dimension"""

    def test_phase_portrait(self, tmp_path):
        """Test the phase portrait table and coverage checks"""
        config = small_config(experiment="PhasePortrait", **{"lambda": 0.5}, n_traj=5, n_steps=60)
        summary = run_experiment(config, out=str(tmp_path))
        assert summary.files == ["phase_portrait.csv"]
        frame = pd.read_csv(tmp_path / "phase_portrait.csv")
        assert list(frame.columns) == ["traj_id", "step", "Y", "Z"]
        assert "grid_coverage" in summary.empirical
        assert "regular_curve_scatter" in summary.passed

    def test_fidelity_sweep_files(self, tmp_path):
        """Test the fidelity sweep tables and checks"""
        config = small_config(experiment="FidelitySweep", lambda_list=[0.5, 7.0], n_kicks=12, n_states=6)
        summary = run_experiment(config, out=str(tmp_path))
        frame = pd.read_csv(tmp_path / "fidelity_sweep.csv")
        assert list(frame.columns) == KICK_COLUMNS
        assert len(frame) == 24
        assert set(frame["curve"]) == {"KickedTopTR(lambda=0.5)", "KickedTopTR(lambda=7)"}
        assert summary.passed["trace_identity[KickedTopTR(lambda=7)]"] is True
        assert "fidelity_ordering" in summary.empirical
        assert summary.passed["fidelity_ordering"] is None
        assert summary.tolerance["fidelity_chaotic_over_regular"] == 1.0

    def test_summary_json(self, tmp_path):
        """Test the written summary.json"""
        config = small_config(experiment="FisherSweep", lambda_list=[0.5, 7.0], n_kicks=10, n_states=3)
        run_experiment(config, out=str(tmp_path))
        payload = ResultStore(tmp_path).read_summary()
        for key in ("experiment", "seed", "config", "analytic", "empirical", "tolerance", "pass", "all_passed", "files"):
            assert key in payload
        assert payload["experiment"] == "FisherSweep"
        assert payload["seed"] == 7
        assert payload["config"]["lambda_list"] == [0.5, 7.0]
        assert payload["pass"]["amgm[KickedTopTR(lambda=7)]"] is True

    def test_entropy_sweep_parity_rank(self, tmp_path):
        """Test that the resolved rank follows parity at j = 2"""
        config = small_config(experiment="EntropySweep", j=2, lambda_list=[7.0], n_kicks=40, n_states=2)
        summary = run_experiment(config, out=str(tmp_path))
        assert summary.passed["parity_rank[KickedTopTR(lambda=7)]"] is True
        assert summary.empirical["parity_rank[KickedTopTR(lambda=7)]"] <= 12

    def test_sweep_adds_companion_curve(self, tmp_path):
        """Test that sweeps add the three-axis companion curve"""
        config = small_config(
            experiment="EntropySweep", lambda_list=[3.0], dynamics="CUE", n_kicks=10, n_states=2
        )
        run_experiment(config, out=str(tmp_path))
        frame = pd.read_csv(tmp_path / "entropy_sweep.csv")
        assert set(frame["curve"]) == {"KickedTopTR(lambda=3)", "CUE"}

    def test_ensemble_compare(self, tmp_path):
        """Test the ensemble comparison table"""
        config = small_config(experiment="EnsembleCompare", ensemble="COE", n_kicks=10, n_states=2, n_samples=4)
        summary = run_experiment(config, out=str(tmp_path))
        assert summary.files == ["ensemble_compare.csv", "ensemble_samples.csv"]
        samples = pd.read_csv(tmp_path / "ensemble_samples.csv")
        assert len(samples) == 4
        assert (samples["ensemble"] == "COE").all()
        assert summary.passed["curve_gap"] is None
        assert "ensemble_average_entropy" in summary.analytic

    def test_analytic_table(self, tmp_path):
        """Test the analytic table rows at j = 1"""
        config = small_config(experiment="AnalyticTable", n_samples=4)
        summary = run_experiment(config, out=str(tmp_path))
        table = pd.read_csv(tmp_path / "analytic_table.csv")
        assert list(table.columns) == ["row", "analytic", "empirical", "tolerance", "pass"]
        assert set(table["row"]) >= {"ParityBlockCOE", "CUE", "HaarPerStep", "KickedTopTR", "KickedTopNoTR"}
        assert summary.passed["HaarPerStep_rank"] is True
        assert summary.analytic["HaarPerStep"] == pytest.approx(np.log(8))
        assert summary.passed["CUE_closed_form"] is None
        assert summary.passed["KickedTopNoTR_swap_residual"] is None
        assert summary.analytic["CUE"] == pytest.approx(dephased_entropy_prediction(EnsembleKind.CUE, 3))

    def test_unwritable_output(self, tmp_path):
        """Test that an unwritable output directory raises"""
        blocker = tmp_path / "file.txt"
        blocker.write_text("x")
        config = small_config(experiment="PhasePortrait", **{"lambda": 7.0}, n_traj=2, n_steps=5)
        with pytest.raises(OSError):
            run_experiment(config, out=str(blocker / "out"))

    @pytest.mark.integration
    def test_results_independent_of_workers(self, tmp_path):
        """Test that worker count does not change the CSV bytes"""
        config = small_config(experiment="FidelitySweep", lambda_list=[0.5, 3.0, 7.0], n_kicks=15, n_states=4, sigma=0.05)
        run_experiment(config, workers=1, out=str(tmp_path / "serial"))
        run_experiment(config, workers=2, out=str(tmp_path / "parallel"))
        serial = (tmp_path / "serial" / "fidelity_sweep.csv").read_bytes()
        parallel = (tmp_path / "parallel" / "fidelity_sweep.csv").read_bytes()
        assert serial == parallel

    def test_seed_changes_results(self, tmp_path):
        """Test that another master seed changes the results"""
        config = small_config(experiment="FidelitySweep", lambda_list=[7.0], n_kicks=10, n_states=3, sigma=0.1)
        a = run_experiment(config, seed=1, out=str(tmp_path / "a"))
        b = run_experiment(config, seed=2, out=str(tmp_path / "b"))
        assert a.empirical["final_fidelity[KickedTopTR(lambda=7)]"] != b.empirical["final_fidelity[KickedTopTR(lambda=7)]"]


@pytest.mark.slow
class TestReferenceRuns:
    """Test the reference experiments at j = 10"""

    def test_four_lambda_fidelity_sweep(self, tmp_path):
        """Test that noiseless sweeps only give a verdict for chaotic over regular fidelity"""
        config = small_config(
            experiment="FidelitySweep", j=10, seed=0, lambda_list=[0.5, 2.5, 3.0, 7.0], n_kicks=100, n_states=50
        )
        summary = run_experiment(config, out=str(tmp_path))
        assert summary.passed["fidelity_ordering"] is None
        assert summary.passed["fidelity_chaotic_over_regular"] is True
        assert (
            summary.empirical["final_fidelity[KickedTopTR(lambda=7)]"]
            > summary.empirical["final_fidelity[KickedTopTR(lambda=0.5)]"]
        )
        assert summary.all_passed

    def test_analytic_table_passes(self, tmp_path):
        """Test that every analytic row with a tolerance passes at d = 21"""
        summary = run_experiment(default_config("AnalyticTable"), out=str(tmp_path))
        for row in ("ParityBlockCOE", "CUE", "KickedTopTR", "KickedTopNoTR", "HaarPerStep", "HaarPerStep_rank"):
            assert summary.passed[row] is True, row
        assert summary.analytic["CUE"] == pytest.approx(5.547, abs=1e-3)
        assert summary.empirical["KickedTopNoTR_swap_residual"] > 1e-3
        assert summary.all_passed


class TestCli:
    """Test exit codes of the command-line entry point"""

    def test_success(self, tmp_path):
        """Test a successful command-line run"""
        config = tmp_path / "portrait.json"
        config.write_text(json.dumps({"experiment": "PhasePortrait", "lambda": 0.5, "j": 1, "n_traj": 3, "n_steps": 20}))
        code = main(["PhasePortrait", "--config", str(config), "--out", str(tmp_path / "out")])
        assert code == EXIT_OK
        assert (tmp_path / "out" / "summary.json").exists()

    def test_invalid_config(self, tmp_path):
        """Test the exit code of an invalid configuration"""
        config = tmp_path / "bad.json"
        config.write_text('{"experiment": "FidelitySweep"}')
        assert main(["FidelitySweep", "--config", str(config), "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_subcommand_mismatch(self, tmp_path):
        """Test that a subcommand must match the configured experiment"""
        config = tmp_path / "portrait.json"
        config.write_text('{"experiment": "PhasePortrait", "lambda": 7}')
        assert main(["AnalyticTable", "--config", str(config), "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_zero_workers(self, tmp_path):
        """Test that zero workers exit with the config code"""
        assert main(["AnalyticTable", "--workers", "0", "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_unwritable_output(self, tmp_path):
        """Test the exit code of an unwritable output directory"""
        config = tmp_path / "portrait.json"
        config.write_text('{"experiment": "PhasePortrait", "lambda": 7, "j": 1, "n_traj": 2, "n_steps": 5}')
        blocker = tmp_path / "file.txt"
        blocker.write_text("x")
        code = main(["PhasePortrait", "--config", str(config), "--out", str(blocker / "out")])
        assert code == EXIT_RUNTIME

    def test_settings_default(self):
        """Test the default worker count"""
        assert RuntimeSettings().workers == 1
