# tests/unit/test_config.py

import pytest

from zsm.core.config import Settings, get_settings, settings

pytestmark = pytest.mark.unit


def test_defaults():
    assert settings.EPSILON == 1e5
    assert settings.LOS_THRESHOLD == 38.0
    assert settings.MAX_GENERATORS == 20
    assert settings.SLIVER_WIDTH == 1e-5


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("ZSM_EPSILON", "500")
    monkeypatch.setenv("ZSM_THREADS", "4")
    fresh = Settings()
    assert fresh.EPSILON == 500.0
    assert fresh.THREADS == 4


def test_get_settings_is_cached():
    assert get_settings() is get_settings()
