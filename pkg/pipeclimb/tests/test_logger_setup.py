"""
Unit Tests for Logging Configuration and Error Mapping

Test Coverage:
- Log level selection from PIPECLIMB_LOG, including unknown values
- Unknown PIPECLIMB_LOG values reported once per logger
- Log files written under PIPECLIMB_LOG_DIR
- No duplicate handlers on repeated requests
- Exception to exit-code mapping

Author: Pipe Climber Simulation Team
Date: 2026
"""

import logging
import uuid

import pytest

from pipeclimb.scripts.errors import (
    EXIT_CONFIG,
    EXIT_SOLVER,
    AlignmentError,
    ConfigError,
    InfeasibleConstraintError,
    ParameterError,
    PipeClimbError,
    RangeError,
    SolverError,
    UndefinedPowerError,
    exit_code_for,
)
from pipeclimb.scripts.logger_setup import get_logger, resolve_level


@pytest.fixture
def log_env(tmp_path, monkeypatch):
    """Point log files at tmp_path and return a fresh logger name."""
    monkeypatch.setenv("PIPECLIMB_LOG_DIR", str(tmp_path))
    monkeypatch.delenv("PIPECLIMB_LOG", raising=False)
    name = f"test_{uuid.uuid4().hex[:8]}"
    yield name
    logger = logging.getLogger(f"pipeclimb.{name}")
    for handler in list(logger.handlers):
        handler.close()
        logger.removeHandler(handler)


@pytest.mark.parametrize("value, level", [
    ("error", logging.ERROR),
    ("INFO", logging.INFO),
    (" debug ", logging.DEBUG),
])
def test_resolve_level(monkeypatch, value, level):
    monkeypatch.setenv("PIPECLIMB_LOG", value)
    assert resolve_level() == (level, False)


def test_resolve_level_default_and_unknown(monkeypatch):
    monkeypatch.delenv("PIPECLIMB_LOG", raising=False)
    assert resolve_level() == (logging.INFO, False)
    monkeypatch.setenv("PIPECLIMB_LOG", "chatty")
    assert resolve_level() == (logging.INFO, True)


def test_logger_writes_file(log_env, tmp_path):
    logger = get_logger(log_env)
    assert logger.name == f"pipeclimb.{log_env}"
    logger.info("hello from the simulator")
    for handler in logger.handlers:
        handler.flush()
    content = (tmp_path / f"{log_env}.log").read_text()
    assert "[INFO]" in content and "hello from the simulator" in content


def test_no_duplicate_handlers(log_env):
    first = get_logger(log_env)
    second = get_logger(log_env)
    assert first is second
    assert len(second.handlers) == 2


def test_level_refreshes_between_calls(log_env, monkeypatch):
    monkeypatch.setenv("PIPECLIMB_LOG", "error")
    assert get_logger(log_env).level == logging.ERROR
    monkeypatch.setenv("PIPECLIMB_LOG", "debug")
    assert get_logger(log_env).level == logging.DEBUG


def test_unknown_level_warns(log_env, monkeypatch, tmp_path):
    monkeypatch.setenv("PIPECLIMB_LOG", "chatty")
    logger = get_logger(log_env)
    for handler in logger.handlers:
        handler.flush()
    assert "Unknown PIPECLIMB_LOG value 'chatty'" in (tmp_path / f"{log_env}.log").read_text()


def test_unknown_level_warns_once(log_env, monkeypatch, tmp_path):
    monkeypatch.setenv("PIPECLIMB_LOG", "verbose")
    for _ in range(100):
        logger = get_logger(log_env)
    for handler in logger.handlers:
        handler.flush()
    assert (tmp_path / f"{log_env}.log").read_text().count("Unknown PIPECLIMB_LOG value") == 1


@pytest.mark.parametrize("error, code", [
    (ConfigError("sim.dt", "must be > 0"), EXIT_CONFIG),
    (ParameterError("bad", field="k"), EXIT_CONFIG),
    (RangeError("out of range"), EXIT_CONFIG),
    (InfeasibleConstraintError("all locked"), EXIT_CONFIG),
    (UndefinedPowerError("stalled"), EXIT_CONFIG),
    (AlignmentError("timestamps"), EXIT_CONFIG),
    (ValueError("plain"), EXIT_CONFIG),
    (SolverError("no root", bracket=(0.0, 1.0), iterations=50), EXIT_SOLVER),
    (PipeClimbError("other"), EXIT_SOLVER),
])
def test_exit_code_for(error, code):
    assert exit_code_for(error) == code


def test_config_error_message_names_key():
    error = ConfigError("network.segments[0].length", "required key is missing")
    assert str(error) == "network.segments[0].length: required key is missing"
    assert error.key == "network.segments[0].length"
    assert str(ConfigError("", "plain message")) == "plain message"


if __name__ == "__main__":
    pytest.main([__file__, "-q"])
