"""
Toolkit configuration using Pydantic Settings.
Loads process-wide defaults from environment variables and .env file.
"""

from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Process-wide defaults loaded from environment variables.

    Command and experiment parameters live in their own schemas; these are
    the numerical tolerances and runtime knobs shared by every command.
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    # Application Settings
    PROJECT_NAME: str = "tvglasso"
    VERSION: str = "1.0.0"
    DEBUG: bool = False
    ENVIRONMENT: Literal["development", "production"] = "development"

    # Logging
    LOG_LEVEL: str = "INFO"

    # Linear algebra tolerances
    CHOLESKY_TOL: float = Field(1e-12, gt=0)
    PSD_RELATIVE_TOL: float = Field(1e-10, gt=0)

    # Graphical lasso solver
    GLASSO_TOL: float = Field(1e-6, gt=0)
    GLASSO_MAX_ITER: int = Field(1000, ge=1)
    LASSO_TOL: float = Field(1e-10, gt=0)
    LASSO_MAX_ITER: int = Field(10000, ge=1)
    ZERO_TOL: float = Field(1e-6, ge=0)

    # Monte-Carlo experiments
    MC_BATCH_SIZE: int = Field(1000, ge=1)

    # Runtime
    THREADS: int = Field(1, ge=1)
    ENABLE_METRICS: bool = True

    @field_validator("LOG_LEVEL")
    @classmethod
    def normalize_log_level(cls, v: str) -> str:
        """Accept log levels in any case"""
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unknown log level: {v}")
        return level

    @property
    def is_dev(self) -> bool:
        """Whether console (rather than JSON) logging is wanted"""
        return self.ENVIRONMENT == "development" or self.DEBUG


# Global settings instance
settings = Settings()
