"""
Application configuration
Handles environment variables and toolkit-wide defaults
"""
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

TOOL_NAME = "wherelog"
TOOL_VERSION = "0.1.0"

PROJECT_ROOT = Path(__file__).resolve().parents[2]


class Settings(BaseSettings):
    """Toolkit configuration using Pydantic Settings"""

    # logging
    log_level: str = Field(default="INFO")

    # parallelism cap for per-file work and ensemble members
    jobs: int = Field(default=1, ge=1)

    # log detection
    strict_log_regex: bool = Field(default=False)

    # extraction gates
    residual_threshold: float = Field(default=0.005, ge=0.0, le=1.0)
    parse_failure_warning_ratio: float = Field(default=0.10, ge=0.0, le=1.0)

    # project selection for scans: logged ratio and production files, both strict
    selection_min_logged_ratio: float = Field(default=0.04, ge=0.0, le=1.0)
    selection_min_production_files: int = Field(default=100, ge=0)

    # learning
    search_space_path: Path = Field(default=PROJECT_ROOT / "config" / "search_space.yaml")

    # feature schema
    schema_version: int = Field(default=1)

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="WHERELOG_",
        case_sensitive=False,
    )

    @property
    def tool_version(self) -> str:
        """Version string embedded in every output file"""
        return f"{TOOL_NAME}/{TOOL_VERSION}"


# Global Instance
settings = Settings()
