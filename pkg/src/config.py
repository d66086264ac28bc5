"""Configuration management for hydrospec."""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

from pydantic import Field
from pydantic_settings import BaseSettings

if TYPE_CHECKING:
    from src.densela.qz import QZConfig


class QZSettings(BaseSettings):
    """Defaults for the QZ iteration."""

    max_sweeps: int = Field(default=30, ge=1, alias="HYDROSPEC_QZ_MAX_SWEEPS")
    exceptional_period: int = Field(default=10, ge=1, alias="HYDROSPEC_QZ_EXCEPTIONAL_PERIOD")
    deflation_factor: float = Field(default=1.0, gt=0, alias="HYDROSPEC_QZ_DEFLATION_FACTOR")

    model_config = {"env_prefix": "HYDROSPEC_QZ_", "extra": "ignore", "populate_by_name": True}

    def to_config(self) -> QZConfig:
        from src.densela.qz import QZConfig

        return QZConfig(
            max_sweeps_per_eigenvalue=self.max_sweeps,
            exceptional_shift_period=self.exceptional_period,
            deflation_factor=self.deflation_factor,
        )


class SweepSettings(BaseSettings):
    """Worker pool and spectrum cache settings."""

    jobs: int = Field(default=1, ge=1, alias="HYDROSPEC_JOBS")
    cache_dir: Path = Field(default=Path(".hydrospec-cache"), alias="HYDROSPEC_CACHE_DIR")

    model_config = {"env_prefix": "HYDROSPEC_", "extra": "ignore", "populate_by_name": True}


class LoggingSettings(BaseSettings):
    """structlog output settings."""

    level: str = Field(default="INFO", alias="HYDROSPEC_LOG_LEVEL")
    json_output: bool = Field(default=False, alias="HYDROSPEC_LOG_JSON")

    model_config = {"env_prefix": "HYDROSPEC_LOG_", "extra": "ignore", "populate_by_name": True}


class Settings(BaseSettings):
    """Root settings aggregating all configuration."""

    qz: QZSettings = Field(default_factory=QZSettings)
    sweep: SweepSettings = Field(default_factory=SweepSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)

    model_config = {"env_file": ".env", "env_file_encoding": "utf-8", "extra": "ignore"}


def get_settings() -> Settings:
    """Create and return application settings."""
    return Settings()
