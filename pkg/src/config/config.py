"""
Configuration Management for hexkerr

Centralized environment variable loading and validation.
"""

from __future__ import annotations
import os
from typing import Any
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        return -1


class Config:
    """Application configuration from environment variables"""

    # ===== PARALLELISM =====
    HEXKERR_THREADS: int = _int_env("HEXKERR_THREADS", min(os.cpu_count() or 1, 8))

    # ===== OUTPUT =====
    HEXKERR_OUT_DIR: str = os.getenv("HEXKERR_OUT_DIR", "out")

    # ===== FOCK ORACLE =====
    HEXKERR_MAX_BASIS: int = _int_env("HEXKERR_MAX_BASIS", 1_000_000)

    # ===== APPLICATION SETTINGS =====
    ENVIRONMENT: str = os.getenv("HEXKERR_ENVIRONMENT", "development")
    LOG_LEVEL: str = os.getenv("HEXKERR_LOG_LEVEL", "info")

    @classmethod
    def validate_required(cls) -> list[str]:
        """
        Validate environment settings.

        Returns:
            List of problems (empty if all settings are usable)
        """
        problems = []
        if cls.HEXKERR_THREADS < 1:
            problems.append("HEXKERR_THREADS must be a positive integer")
        if cls.HEXKERR_MAX_BASIS < 1:
            problems.append("HEXKERR_MAX_BASIS must be a positive integer")
        if cls.LOG_LEVEL.lower() not in ("debug", "info", "warning", "error", "critical"):
            problems.append(f"HEXKERR_LOG_LEVEL '{cls.LOG_LEVEL}' is not a log level")
        return problems

    @classmethod
    def is_production(cls) -> bool:
        """Check if running in production"""
        return cls.ENVIRONMENT.lower() == "production"

    @classmethod
    def as_dict(cls) -> dict[str, Any]:
        """Export config as dictionary"""
        return {
            "threads": cls.HEXKERR_THREADS,
            "out_dir": cls.HEXKERR_OUT_DIR,
            "max_basis": cls.HEXKERR_MAX_BASIS,
            "environment": cls.ENVIRONMENT,
            "log_level": cls.LOG_LEVEL,
        }


# Singleton instance
config = Config()
