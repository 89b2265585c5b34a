"""
Runtime settings read from the environment (prefix VECKIN_) and an optional .env file.
"""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide solver settings"""

    model_config = SettingsConfigDict(
        env_prefix="VECKIN_",
        env_file=".env",
        extra="ignore",
    )

    # Worker cap for convergence sweeps (VECKIN_THREADS)
    threads: int = Field(default=1, ge=1)
    log_level: str = "INFO"
    output_dir: str = "output"


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()
