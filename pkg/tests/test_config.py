import json
import logging
from pathlib import Path

import pytest

from reglab.config import RunConfig, build_run_config, load_config_file, load_env
from reglab.logging_config import LOG_FILE_NAME, configure_logging


def test_defaults():
    config = build_run_config()
    assert config == RunConfig()
    assert config.n_max == 12
    assert config.format == "table"
    assert config.output_root == Path("reglab-out")


def test_env_file_is_read(tmp_path, monkeypatch):
    # registered so teardown removes what load_dotenv sets
    monkeypatch.setenv("REGLAB_JOBS", "placeholder")
    monkeypatch.delenv("REGLAB_JOBS")
    env = tmp_path / "custom.env"
    env.write_text("REGLAB_JOBS=3\n", encoding="utf-8")
    assert load_env(env) == {"jobs": "3"}
    assert build_run_config(env_path=env).jobs == 3


def test_precedence_env_file_cli(tmp_path, monkeypatch):
    monkeypatch.setenv("REGLAB_JOBS", "2")
    monkeypatch.setenv("REGLAB_LOG_LEVEL", "debug")
    config_path = tmp_path / "config.yaml"
    config_path.write_text("jobs: 4\nn_max: 9\nformat: CSV\n", encoding="utf-8")

    from_env = build_run_config()
    assert from_env.jobs == 2
    assert from_env.log_level == "DEBUG"

    from_file = build_run_config(config_path=config_path)
    assert from_file.jobs == 4
    assert from_file.n_max == 9
    assert from_file.format == "csv"

    from_cli = build_run_config(config_path=config_path, cli_values={"jobs": 8, "n_max": None})
    assert from_cli.jobs == 8
    assert from_cli.n_max == 9


def test_config_path_from_environment(tmp_path, monkeypatch):
    config_path = tmp_path / "run.json"
    config_path.write_text(json.dumps({"m": 3, "degree_slack": 0}), encoding="utf-8")
    monkeypatch.setenv("REGLAB_CONFIG", str(config_path))
    config = build_run_config()
    assert config.m == 3
    assert config.degree_slack == 0


@pytest.mark.parametrize(
    "text",
    ["n_max: 0\n", "degree_cap: -1\n", "format: xml\n", "jobs: many\n", "colour: blue\n", "- 1\n- 2\n"],
)
def test_invalid_config_files(tmp_path, text):
    path = tmp_path / "bad.yaml"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ValueError):
        build_run_config(config_path=path)


def test_config_file_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config_file(tmp_path / "missing.yaml")
    other = tmp_path / "config.toml"
    other.write_text("x = 1\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_config_file(other)
    empty = tmp_path / "empty.yaml"
    empty.write_text("", encoding="utf-8")
    assert load_config_file(empty) == {}


def test_with_overrides_skips_none():
    config = RunConfig().with_overrides(m=2, n_max=None)
    assert config.m == 2
    assert config.n_max == RunConfig().n_max


def test_configure_logging_writes_file(tmp_path):
    configure_logging("debug", tmp_path / "logs")
    logging.getLogger("reglab.test").debug("hello from the test")
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert "hello from the test" in (tmp_path / "logs" / LOG_FILE_NAME).read_text(encoding="utf-8")
    assert len(logging.getLogger().handlers) == 2
    configure_logging("INFO")
    assert len(logging.getLogger().handlers) == 1
