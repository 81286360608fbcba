from pathlib import Path
from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field


class Settings(BaseSettings):
    """Process-level settings configuration"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="LCO_",
        case_sensitive=False,
        extra="ignore",
    )

    # Application Configuration
    app_env: str = Field(default="development")
    app_host: str = Field(default="0.0.0.0")
    app_port: int = Field(default=8000)

    # Logging / output
    log_dir: str = Field(default="logs")
    log_level: str = Field(default="INFO")
    output_dir: str = Field(default="results")

    # Solver Configuration
    threads: int = Field(default=1, ge=1, description="Default worker cap for candidate batches")
    kernel_sigmas: float = Field(default=9.0, gt=0, description="Kernel truncation half-width in standard deviations")
    kernel_batch_elements: int = Field(default=4_000_000, ge=1, description="Working-set cap for one kernel batch")
    tie_tolerance: float = Field(default=1e-12, ge=0, description="Scores within this of the best are ties [EUR m-2]")
    cache_size: int = Field(default=8, ge=1, description="Weather days kept in the dynamics cache")


def get_settings() -> Settings:
    """Get settings instance"""
    settings = Settings()

    # Resolve relative paths using pathlib
    project_root = Path(__file__).parent.parent.parent
    log_dir = Path(settings.log_dir)
    output_dir = Path(settings.output_dir)

    if not log_dir.is_absolute():
        settings.log_dir = str(project_root / log_dir)

    if not output_dir.is_absolute():
        settings.output_dir = str(project_root / output_dir)

    return settings


# Global settings instance
settings = get_settings()
