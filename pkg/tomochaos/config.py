"""
Configuration Layer
Parsing and validation of experiment documents and runtime settings
"""
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from dotenv import load_dotenv
from pydantic import ValidationError

from .state import (
    ALIASES,
    REQUIRED_FIELDS,
    ConfigError,
    ExperimentConfig,
    ExperimentKind,
    SWEEP_LAMBDAS,
    RuntimeSettings,
)

logger = logging.getLogger(__name__)

ENV_WORKERS = "TOMOCHAOS_WORKERS"
ENV_OUTPUT_DIR = "OUTPUT_DIR"
ENV_LOG_LEVEL = "LOG_LEVEL"
ENV_DEBUG = "DEBUG_MODE"


class ConfigValidator:
    """Checks applied to experiment documents before and after model validation"""

    LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

    @classmethod
    def allowed_keys(cls) -> Dict[str, str]:
        """Map every accepted document key (field name or alias) to its field name"""
        keys = {}
        for name, info in ExperimentConfig.model_fields.items():
            keys[name] = name
            if info.alias:
                keys[info.alias] = name
        return keys

    @classmethod
    def check_keys(cls, document: Dict[str, Any]) -> Tuple[bool, str]:
        """
        Reject keys the config model does not know
        Returns: (is_valid, offending_key)
        """
        allowed = cls.allowed_keys()
        for key in document:
            if key not in allowed:
                return False, key
        return True, ""

    @classmethod
    def check_required(cls, document: Dict[str, Any], kind: ExperimentKind) -> Tuple[bool, str]:
        """
        Experiment-specific required keys
        Returns: (is_valid, missing_key)
        """
        for name in REQUIRED_FIELDS.get(kind, ()):
            key = ALIASES.get(name, name)
            if key not in document and name not in document:
                return False, key
        return True, ""

    @classmethod
    def check_output_dir(cls, path: Union[str, Path]) -> Tuple[bool, str]:
        """
        Output directory must exist and be writable, or be creatable
        Returns: (is_valid, error_message)
        """
        target = Path(path)
        ancestor = target
        while not ancestor.exists():
            if ancestor.parent == ancestor:
                break
            ancestor = ancestor.parent
        if ancestor.exists() and not ancestor.is_dir():
            return False, f"Output path component is not a directory: {ancestor}"
        if not os.access(ancestor, os.W_OK):
            return False, f"Output directory is not writable: {ancestor}"
        return True, ""

    @classmethod
    def check_log_level(cls, level: str) -> Tuple[bool, str]:
        if level.upper() not in cls.LOG_LEVELS:
            return False, f"Unknown log level '{level}', expected one of {', '.join(cls.LOG_LEVELS)}"
        return True, ""


def _line_of(text: str, key: Optional[str]) -> Optional[int]:
    """1-based line of the first occurrence of a quoted key"""
    if not key:
        return None
    needle = f'"{key}"'
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return number
    return None


def parse_config(text: str) -> ExperimentConfig:
    """
    Parse a flat JSON experiment document

    Args:
        text: JSON object with an "experiment" key

    Returns:
        Validated ExperimentConfig with defaults applied

    Raises:
        ConfigError: malformed JSON, unknown or missing keys, invalid values
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", line=e.lineno) from e

    if not isinstance(document, dict):
        raise ConfigError("configuration must be a JSON object")

    ok, key = ConfigValidator.check_keys(document)
    if not ok:
        raise ConfigError(f"unknown key '{key}'", field=key, line=_line_of(text, key))

    if "experiment" not in document:
        raise ConfigError("missing required key 'experiment'", field="experiment")
    try:
        kind = ExperimentKind(document["experiment"])
    except ValueError:
        choices = ", ".join(k.value for k in ExperimentKind)
        raise ConfigError(
            f"unknown experiment '{document['experiment']}', expected one of {choices}",
            field="experiment",
            line=_line_of(text, "experiment"),
        ) from None

    ok, key = ConfigValidator.check_required(document, kind)
    if not ok:
        raise ConfigError(f"missing required key '{key}' for {kind.value}", field=key)

    try:
        config = ExperimentConfig.model_validate(document)
    except ValidationError as e:
        first = e.errors()[0]
        field = str(first["loc"][0]) if first["loc"] else None
        if field is None and "integer j" in first["msg"]:
            field = "j"
        raise ConfigError(first["msg"], field=field, line=_line_of(text, field)) from e

    logger.debug("Parsed %s configuration", config.experiment.value)
    return config


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read and parse a config file"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e.strerror or e}") from e
    return parse_config(text)


def default_config(kind: Union[str, ExperimentKind], **overrides: Any) -> ExperimentConfig:
    """Config for a CLI subcommand run without --config; required keys come from the default grid"""
    kind = ExperimentKind(kind)
    document: Dict[str, Any] = {"experiment": kind.value}
    if kind == ExperimentKind.PHASE_PORTRAIT:
        document["lambda"] = 7.0
    elif kind in (ExperimentKind.FIDELITY_SWEEP, ExperimentKind.ENTROPY_SWEEP, ExperimentKind.FISHER_SWEEP):
        document["lambda_list"] = list(SWEEP_LAMBDAS)
    elif kind == ExperimentKind.ENSEMBLE_COMPARE:
        document["ensemble"] = "ParityBlockCOE"
    document.update({k: v for k, v in overrides.items() if v is not None})
    return parse_config(json.dumps(document))


def load_settings(env_path: Optional[Union[str, Path]] = None, **overrides: Any) -> RuntimeSettings:
    """
    Runtime settings from the environment (after loading .env) with explicit overrides

    Args:
        env_path: .env file to load; the one in the working directory by default
        overrides: workers, output_dir, log_level, debug_mode (None values ignored)
    """
    load_dotenv(dotenv_path=env_path)
    raw_workers = os.getenv(ENV_WORKERS, "1")
    try:
        workers = int(raw_workers)
    except ValueError:
        raise ConfigError(f"expected an integer, got '{raw_workers}'", field=ENV_WORKERS) from None

    values: Dict[str, Any] = {
        "workers": workers,
        "output_dir": os.getenv(ENV_OUTPUT_DIR, "results"),
        "log_level": os.getenv(ENV_LOG_LEVEL, "INFO").upper(),
        "debug_mode": os.getenv(ENV_DEBUG, "false").lower() == "true",
    }
    values.update({k: v for k, v in overrides.items() if v is not None})

    ok, message = ConfigValidator.check_log_level(values["log_level"])
    if not ok:
        raise ConfigError(message, field=ENV_LOG_LEVEL)
    try:
        return RuntimeSettings(**values)
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(first["msg"], field=str(first["loc"][0]) if first["loc"] else None) from e
