from __future__ import annotations

from collections.abc import Iterator

import pytest
from pydantic import ValidationError

from src.cli import build_parser
from src.settings import get_settings


@pytest.fixture(autouse=True)
def _fresh_settings() -> Iterator[None]:
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def test_defaults(monkeypatch: pytest.MonkeyPatch) -> None:
    for name in ("PSI_DEFAULT_BUDGET", "PSI_MAX_STEPS", "PSI_ORACLE_BUDGET", "PSI_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    settings = get_settings()
    assert settings.default_budget == 10_000
    assert settings.oracle_budget == 50_000
    assert settings.max_steps == 1_000


def test_environment_overrides(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("PSI_DEFAULT_BUDGET", "250")
    monkeypatch.setenv("PSI_MAX_STEPS", "12")
    monkeypatch.setenv("PORT", "9001")
    settings = get_settings()
    assert (settings.default_budget, settings.max_steps, settings.port) == (250, 12, 9001)


def test_cli_defaults_follow_settings(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("PSI_DEFAULT_BUDGET", "77")
    args = build_parser().parse_args(["class", "x where x : X"])
    assert args.budget == 77


def test_budgets_must_be_positive(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("PSI_MAX_STEPS", "0")
    with pytest.raises(ValidationError):
        get_settings()
