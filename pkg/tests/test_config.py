"""
Configuration Test Suite
- Experiment document parsing and defaults
- Field-level error reporting
- Runtime settings from the environment
"""
import json

import pytest

from tomochaos.config import ConfigValidator, default_config, load_config, load_settings, parse_config
from tomochaos.state import ConfigError, DynamicsKind, EnsembleKind, ExperimentKind


class TestParseConfig:
    """Test experiment documents"""

    def test_phase_portrait_defaults(self):
        """Test the defaults filled in for a phase portrait"""
        config = parse_config('{"experiment": "PhasePortrait", "lambda": 7}')
        assert config.experiment == ExperimentKind.PHASE_PORTRAIT
        assert config.lam == 7.0
        assert config.j == 10.0
        assert config.alpha == 1.4
        assert config.n_traj == 50
        assert config.n_steps == 500
        assert config.sigma == 0.0
        assert config.seed == 0

    def test_sweep_with_lambda_list(self):
        """Test a sweep configured with a list of kick strengths"""
        config = parse_config(json.dumps({"experiment": "EntropySweep", "lambda_list": [0.5, 7.0], "n_kicks": 20}))
        assert config.lambda_list == [0.5, 7.0]
        assert config.n_kicks == 20
        assert config.dynamics == DynamicsKind.KICKED_TOP_TR

    def test_missing_lambda_list_names_field(self):
        """Test that a sweep without lambda_list names the missing field"""
        with pytest.raises(ConfigError) as exc_info:
            parse_config('{"experiment": "FidelitySweep"}')
        assert exc_info.value.field == "lambda_list"
        assert "lambda_list" in str(exc_info.value)

    def test_missing_lambda_names_alias(self):
        """Test that a missing kick strength is reported under its alias"""
        with pytest.raises(ConfigError) as exc_info:
            parse_config('{"experiment": "PhasePortrait"}')
        assert exc_info.value.field == "lambda"

    def test_negative_spin_rejected(self):
        """Test that a negative spin is rejected"""
        with pytest.raises(ConfigError) as exc_info:
            parse_config('{\n  "experiment": "AnalyticTable",\n  "j": -1\n}')
        assert exc_info.value.field == "j"
        assert exc_info.value.line == 3

    def test_half_integer_spin_rejected_for_parity(self):
        """Test that parity-block sampling needs an integer spin"""
        with pytest.raises(ConfigError) as exc_info:
            parse_config('{"experiment": "EnsembleCompare", "ensemble": "ParityBlockCOE", "j": 1.5}')
        assert exc_info.value.field == "j"

    def test_half_integer_spin_allowed_for_cue(self):
        """Test that the CUE accepts half-integer spins"""
        config = parse_config('{"experiment": "EnsembleCompare", "ensemble": "CUE", "j": 1.5}')
        assert config.ensemble == EnsembleKind.CUE

    def test_unknown_key(self):
        """Test that unknown keys are rejected"""
        with pytest.raises(ConfigError) as exc_info:
            parse_config('{"experiment": "AnalyticTable", "kicks": 3}')
        assert exc_info.value.field == "kicks"

    def test_unknown_experiment(self):
        """Test that an unknown experiment is rejected"""
        with pytest.raises(ConfigError) as exc_info:
            parse_config('{"experiment": "Tomography"}')
        assert exc_info.value.field == "experiment"

    def test_malformed_json_reports_line(self):
        """Test that malformed JSON reports its line"""
        with pytest.raises(ConfigError) as exc_info:
            parse_config('{\n  "experiment": "AnalyticTable",\n  "j": \n}')
        assert exc_info.value.line is not None
        assert "invalid JSON" in str(exc_info.value)

    def test_not_an_object(self):
        """Test that a JSON array is not a configuration"""
        with pytest.raises(ConfigError):
            parse_config("[1, 2]")

    @pytest.mark.parametrize("key,value", [
        ("n_kicks", 0),
        ("sigma", -0.1),
        ("seed", -3),
        ("no_tr_convention", "other"),
    ])
    def test_invalid_values(self, key, value):
        """Test that out-of-range values are rejected with their field"""
        with pytest.raises(ConfigError) as exc_info:
            parse_config(json.dumps({"experiment": "AnalyticTable", key: value}))
        assert exc_info.value.field == key

    def test_empty_lambda_list(self):
        """Test that an empty lambda_list is rejected"""
        with pytest.raises(ConfigError):
            parse_config('{"experiment": "FisherSweep", "lambda_list": []}')

    def test_config_error_is_value_error(self):
        """Test that ConfigError is a ValueError"""
        with pytest.raises(ValueError):
            parse_config("{")

    def test_dynamics_spec(self):
        """Test the dynamics spec derived from a configuration"""
        config = parse_config('{"experiment": "FidelitySweep", "lambda_list": [3.0], "alpha": 1.2}')
        spec = config.dynamics_spec(lam=3.0)
        assert spec.kind == DynamicsKind.KICKED_TOP_TR
        assert spec.alpha == 1.2
        assert spec.label == "KickedTopTR(lambda=3)"


class TestConfigFiles:
    """Test file loading and CLI defaults"""

    def test_load_config(self, tmp_path):
        """Test loading a configuration from a file"""
        path = tmp_path / "portrait.json"
        path.write_text('{"experiment": "PhasePortrait", "lambda": 0.5}')
        assert load_config(path).lam == 0.5

    def test_missing_file(self, tmp_path):
        """Test that a missing file raises ConfigError"""
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.json")

    @pytest.mark.parametrize("kind", list(ExperimentKind))
    def test_default_config_for_every_experiment(self, kind):
        """Test that every experiment has a valid default configuration"""
        config = default_config(kind)
        assert config.experiment == kind

    def test_default_config_overrides(self):
        """Test that overrides replace defaults and None keeps them"""
        config = default_config("FisherSweep", seed=9, n_kicks=None)
        assert config.seed == 9
        assert config.n_kicks == 100
        assert config.lambda_list == [0.5, 2.5, 3.0, 7.0]

    def test_allowed_keys_include_alias(self):
        """Test that allowed keys include the lambda alias"""
        keys = ConfigValidator.allowed_keys()
        assert keys["lambda"] == "lam"
        assert "lambda_list" in keys


class TestRuntimeSettings:
    """Test environment-driven settings"""

    def test_defaults(self, monkeypatch, tmp_path):
        """Test runtime settings without environment variables"""
        for name in ("TOMOCHAOS_WORKERS", "OUTPUT_DIR", "LOG_LEVEL", "DEBUG_MODE"):
            monkeypatch.delenv(name, raising=False)
        settings = load_settings(env_path=tmp_path / "missing.env")
        assert settings.workers == 1
        assert settings.output_dir == "results"
        assert settings.log_level == "INFO"
        assert settings.debug_mode is False

    def test_env_file(self, monkeypatch, tmp_path):
        """Test runtime settings read from a .env file"""
        for name in ("TOMOCHAOS_WORKERS", "OUTPUT_DIR", "LOG_LEVEL", "DEBUG_MODE"):
            monkeypatch.delenv(name, raising=False)
        env = tmp_path / ".env"
        env.write_text("TOMOCHAOS_WORKERS=4\nLOG_LEVEL=debug\nDEBUG_MODE=true\n")
        settings = load_settings(env_path=env)
        assert settings.workers == 4
        assert settings.log_level == "DEBUG"
        assert settings.debug_mode is True
        for name in ("TOMOCHAOS_WORKERS", "LOG_LEVEL", "DEBUG_MODE"):
            monkeypatch.delenv(name, raising=False)

    def test_overrides_win(self, monkeypatch):
        """Test that explicit overrides win over the environment"""
        monkeypatch.setenv("TOMOCHAOS_WORKERS", "3")
        settings = load_settings(workers=2, output_dir=None)
        assert settings.workers == 2

    def test_bad_worker_count(self, monkeypatch):
        """Test that a non-numeric worker count is rejected"""
        monkeypatch.setenv("TOMOCHAOS_WORKERS", "many")
        with pytest.raises(ConfigError) as exc_info:
            load_settings()
        assert exc_info.value.field == "TOMOCHAOS_WORKERS"

    def test_zero_workers_rejected(self, monkeypatch):
        """Test that zero workers are rejected"""
        monkeypatch.delenv("TOMOCHAOS_WORKERS", raising=False)
        with pytest.raises(ConfigError):
            load_settings(workers=0)

    def test_unknown_log_level(self, monkeypatch):
        """Test that an unknown log level is rejected"""
        monkeypatch.setenv("LOG_LEVEL", "LOUD")
        with pytest.raises(ConfigError):
            load_settings()

    def test_output_dir_check(self, tmp_path):
        """Test the output directory check on a new path and on a blocked one"""
        ok, _ = ConfigValidator.check_output_dir(tmp_path / "new" / "nested")
        assert ok
        blocker = tmp_path / "file.txt"
        blocker.write_text("x")
        ok, message = ConfigValidator.check_output_dir(blocker / "sub")
        assert not ok
        assert "not a directory" in message
