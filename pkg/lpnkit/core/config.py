"""
Toolkit configuration using Pydantic Settings.

Loads configuration from environment variables (prefix ``LPNKIT_``) and an
optional ``.env`` file, with defaults suited to desk-scale CPU runs.
"""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Toolkit settings loaded from environment variables."""

    # Application
    APP_NAME: str = "lpnkit"
    APP_VERSION: str = "0.1.0"
    LOG_LEVEL: str = "INFO"

    # Multiplier applied to the default wall-time budgets
    TIME_SCALE: float = Field(1.0, gt=0)

    # Rows per forward pass when evaluating accuracy
    EVAL_CHUNK_ROWS: int = Field(65536, ge=1)

    # Thread workers for independent trials (suffixes, initializations, repeats)
    DEFAULT_WORKERS: int = Field(1, ge=1)

    DETERMINISTIC: bool = True

    # Deterministic runs replace each wall-time budget by this many steps per second
    DETERMINISTIC_STEPS_PER_SECOND: float = Field(10.0, gt=0)

    model_config = {
        "env_prefix": "LPNKIT_",
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "case_sensitive": True,
        "extra": "ignore",
    }


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


settings = get_settings()
