"""Pytest configuration and fixtures for pyk3fibration tests."""

import pytest

from pyk3fibration.fibration import WeierstrassModel, analyze
from pyk3fibration.mw import HeightContext


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch, tmp_path):
    """Isolate every test from PYK3_* variables and settings files in the working directory."""
    for name in ("PYK3_LOG_LEVEL", "PYK3_WORKERS", "PYK3_MAX_INTERSECTION", "PYK3_PROGRESS"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("PYK3_SETTINGS", str(tmp_path / "absent.yaml"))
    yield


@pytest.fixture
def settings_file(tmp_path, monkeypatch):
    """Write a settings file and point PYK3_SETTINGS at it."""

    def write(text):
        path = tmp_path / "pyk3fibration.yaml"
        path.write_text(text)
        monkeypatch.setenv("PYK3_SETTINGS", str(path))
        return path

    return write


@pytest.fixture
def x19_model():
    """Order 19 model y^2 = x^3 + t^7 x + t."""
    return WeierstrassModel.from_strings("t^7", "t")


@pytest.fixture
def x19_config(x19_model):
    """Fibers II at 0, III at infinity and 19 fibers I1."""
    return analyze(x19_model)


@pytest.fixture
def p13_config():
    """Fibers IV* at 0, III at infinity and 13 fibers I1."""
    return analyze(WeierstrassModel.from_strings("t^7", "t^4"))


@pytest.fixture
def n3_config():
    """Fibers IV at 0, II* over t^2 - 1 and a smooth fiber at infinity."""
    return analyze(WeierstrassModel.from_strings("0", "t^2*(t^2 - 1)^5"))


@pytest.fixture
def x19_context(x19_config):
    return HeightContext(x19_config)


@pytest.fixture
def p13_context(p13_config):
    return HeightContext(p13_config)
