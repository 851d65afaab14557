""" Tests for the Environment variables """

import pytest

from bvwave.core import ConfigError, EnvConfig


def test_log_level_default(monkeypatch):
    monkeypatch.delenv("BVWAVE_LOG_LEVEL", raising=False)
    assert EnvConfig.log_level() == "INFO"


def test_log_level_is_normalized(monkeypatch):
    monkeypatch.setenv("BVWAVE_LOG_LEVEL", "debug")
    assert EnvConfig.log_level() == "DEBUG"


def test_invalid_log_level(monkeypatch):
    monkeypatch.setenv("BVWAVE_LOG_LEVEL", "chatty")
    with pytest.raises(ConfigError) as excinfo:
        EnvConfig.log_level()
    assert excinfo.value.key == "BVWAVE_LOG_LEVEL"


def test_output_dir(monkeypatch, tmp_path):
    monkeypatch.delenv("BVWAVE_OUTPUT_DIR", raising=False)
    assert EnvConfig.output_dir() == "bvwave-output"
    monkeypatch.setenv("BVWAVE_OUTPUT_DIR", str(tmp_path))
    assert EnvConfig.output_dir() == str(tmp_path)
