"""Run configuration: defaults < environment (.env) < config file < CLI flags."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml
from dotenv import load_dotenv


DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_FORMAT = "table"
DEFAULT_N_MAX = 12
DEFAULT_DEGREE_SLACK = 3
DEFAULT_OUTPUT_ROOT = Path("reglab-out")
FORMATS = ("table", "csv", "json")
CONFIG_KEYS = (
    "degree_cap",
    "degree_slack",
    "homological_cap",
    "n_max",
    "m",
    "characteristic",
    "format",
    "jobs",
    "log_level",
    "log_dir",
    "output_root",
)


@dataclass(frozen=True)
class RunConfig:
    degree_cap: Optional[int] = None
    degree_slack: int = DEFAULT_DEGREE_SLACK
    homological_cap: Optional[int] = None
    n_max: int = DEFAULT_N_MAX
    m: int = 1
    characteristic: Optional[int] = None
    format: str = DEFAULT_FORMAT
    jobs: int = 1
    log_level: str = DEFAULT_LOG_LEVEL
    log_dir: Optional[Path] = None
    output_root: Path = DEFAULT_OUTPUT_ROOT

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def load_env(env_path: Optional[Path] = None) -> dict:
    """REGLAB_* values from a .env file or the process environment."""
    load_dotenv(env_path or Path(".env"), override=False)
    values = {
        "jobs": os.getenv("REGLAB_JOBS"),
        "log_level": os.getenv("REGLAB_LOG_LEVEL"),
        "log_dir": os.getenv("REGLAB_LOG_DIR"),
        "config": os.getenv("REGLAB_CONFIG"),
    }
    return {k: v for k, v in values.items() if v}


def load_config_file(config_path: Optional[Path]) -> dict:
    """Load YAML or JSON configuration from disk."""
    if not config_path:
        return {}
    config_path = Path(config_path).expanduser()
    if not config_path.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")
    if config_path.suffix in {".yaml", ".yml"}:
        loader = yaml.safe_load
    elif config_path.suffix == ".json":
        loader = json.load
    else:
        raise ValueError("Config must be YAML or JSON")
    with config_path.open("r", encoding="utf-8") as fh:
        data = loader(fh)
    if data is not None and not isinstance(data, dict):
        raise ValueError(f"Config file {config_path} must hold a mapping")
    unknown = set(data or {}) - set(CONFIG_KEYS)
    if unknown:
        raise ValueError(f"Unknown config keys: {', '.join(sorted(unknown))}")
    return data or {}


def _as_int(key: str, value: Any, *, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool):
        raise ValueError(f"{key} must be an integer, got {value!r}")
    try:
        number = int(value)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{key} must be an integer, got {value!r}") from exc
    if minimum is not None and number < minimum:
        raise ValueError(f"{key} must be >= {minimum}, got {number}")
    return number


def _validated(values: Mapping[str, Any]) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for key in ("degree_cap", "homological_cap", "n_max", "m", "jobs"):
        if values.get(key) is not None:
            out[key] = _as_int(key, values[key], minimum=1)
    if values.get("degree_slack") is not None:
        out["degree_slack"] = _as_int("degree_slack", values["degree_slack"], minimum=0)
    if values.get("characteristic") is not None:
        out["characteristic"] = _as_int("characteristic", values["characteristic"], minimum=0)
    if values.get("format") is not None:
        fmt = str(values["format"]).lower()
        if fmt not in FORMATS:
            raise ValueError(f"format must be one of {', '.join(FORMATS)}, got {values['format']!r}")
        out["format"] = fmt
    if values.get("log_level"):
        out["log_level"] = str(values["log_level"]).upper()
    for key in ("log_dir", "output_root"):
        if values.get(key):
            out[key] = Path(values[key]).expanduser()
    return out


def build_run_config(
    *,
    config_path: Optional[Path] = None,
    cli_values: Optional[Mapping[str, Any]] = None,
    env_path: Optional[Path] = None,
) -> RunConfig:
    env_values = load_env(env_path)
    if not config_path and env_values.get("config"):
        config_path = Path(env_values["config"])
    config_values = load_config_file(config_path)

    merged: Dict[str, Any] = {}
    for layer in (env_values, config_values, cli_values or {}):
        merged.update({k: v for k, v in layer.items() if v is not None and k != "config"})
    return RunConfig(**_validated(merged))
