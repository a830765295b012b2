"""
Application configuration using Pydantic Settings
"""
from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache
from typing import Optional


class Settings(BaseSettings):
    # Application
    app_name: str = "Robust L1 Regression Lab"
    app_version: str = "1.0.0"
    debug: bool = False
    environment: str = "development"  # development, staging, production
    api_version: str = "v1"
    log_level: str = "INFO"

    # Error Tracking - Sentry
    sentry_dsn: Optional[str] = None

    # Splitting solver defaults
    max_iterations: int = 50_000
    primal_tolerance: float = 1e-8
    dual_tolerance: float = 1e-8
    relative_tolerance: float = 1e-6
    penalty: float = 1.0
    adaptive_penalty: bool = True
    polish: bool = True

    # IRLS (lp regression)
    irls_smoothing: float = 1e-2
    irls_smoothing_floor: float = 1e-8
    irls_max_iterations: int = 500
    lp_restarts: int = 20

    # 1-D filter baseline
    filter_constant: float = 2.0

    # Recovery / experiments
    exact_recovery_threshold: float = 1e-3
    default_trials: int = 5
    sweep_workers: int = 1  # 1 = run jobs in-process
    show_progress: bool = False

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="ROBUSTL1_",
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    return Settings()


# Direct settings instance for convenience imports
settings = get_settings()
