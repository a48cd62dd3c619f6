from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from pydantic import AliasChoices, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

ENV_FILE = Path(__file__).resolve().parents[1] / ".env"


class Settings(BaseSettings):
    """Runtime configuration; the environment wins over ``.env``."""

    model_config = SettingsConfigDict(
        env_prefix="PSI_", env_file=ENV_FILE, env_file_encoding="utf-8", extra="ignore"
    )

    default_budget: int = Field(10_000, gt=0)
    oracle_budget: int = Field(50_000, gt=0)
    max_steps: int = Field(1_000, gt=0)
    log_level: str = "WARNING"
    host: str = Field("0.0.0.0", validation_alias=AliasChoices("HOST", "PSI_HOST"))  # noqa: S104
    port: int = Field(8000, validation_alias=AliasChoices("PORT", "PSI_PORT"))


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
