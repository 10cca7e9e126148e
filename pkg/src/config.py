"""
Application settings.

Read from the environment with the ``CFMM_`` prefix and from a ``.env``
file in the working directory.
"""

from functools import lru_cache
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Runtime settings.

    Attributes:
        log_level: Root logging level
        workers: Worker processes of parameter sweeps
        output_dir: Default directory of experiment artifacts
        api_title: Title of the REST API
    """

    model_config = SettingsConfigDict(env_prefix="CFMM_", env_file=".env", extra="ignore")

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(default="INFO")
    workers: int = Field(default=1, ge=1)
    output_dir: str = Field(default="results")
    api_title: str = Field(default="CFMM No-Trade API")


@lru_cache
def get_settings() -> Settings:
    return Settings()
