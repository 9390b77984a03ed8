from __future__ import annotations

import os
from functools import lru_cache
from pathlib import Path
from typing import ClassVar, Literal

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


# All settings live here.
class BaseConfig(BaseSettings):
    """Common verifier settings."""

    model_config: ClassVar[SettingsConfigDict] = SettingsConfigDict(
        extra="ignore",
    )

    EVM_VERIFIER_ENV: Literal["dev", "test", "prod"] = "prod"
    EVM_VERIFIER_DEBUG: bool = False

    EVM_VERIFIER_SOLVER: Literal["CLARABEL", "SCS"] = "CLARABEL"
    EVM_VERIFIER_SOLVER_TOLERANCE: float = 1e-8
    EVM_VERIFIER_SOLVER_MAX_ITERS: int = 500

    EVM_VERIFIER_CUTOFF: int = 2
    EVM_VERIFIER_BOUNDS_MAX_GRADE: int = 8
    EVM_VERIFIER_THREADS: int = 1

    EVM_VERIFIER_LOG_STREAM: Literal["stdout", "stderr"] = "stderr"
    EVM_VERIFIER_LOG_FILE: Path | None = None
    EVM_VERIFIER_LOG_FILE_MAX_BYTES: int = 5_000_000
    EVM_VERIFIER_LOG_FILE_BACKUPS: int = 3

    @field_validator("EVM_VERIFIER_SOLVER_TOLERANCE")
    @classmethod
    def _tolerance_range(cls, v: float) -> float:
        """Ensure solver tolerance is positive and not looser than 1e-3."""
        if not 0 < v <= 1e-3:
            raise ValueError("EVM_VERIFIER_SOLVER_TOLERANCE must be in (0, 1e-3]")
        return v

    @field_validator(
        "EVM_VERIFIER_SOLVER_MAX_ITERS",
        "EVM_VERIFIER_THREADS",
        "EVM_VERIFIER_LOG_FILE_MAX_BYTES",
    )
    @classmethod
    def _positive(cls, v: int) -> int:
        """Ensure counters are positive."""
        if v <= 0:
            raise ValueError("counts and sizes must be positive")
        return v

    @field_validator("EVM_VERIFIER_CUTOFF")
    @classmethod
    def _cutoff_holds_two_photons(cls, v: int) -> int:
        """Ensure the EVM cutoff reaches the two-photon subspace."""
        if v < 2:
            raise ValueError("EVM_VERIFIER_CUTOFF must be at least 2")
        return v

    @field_validator("EVM_VERIFIER_BOUNDS_MAX_GRADE")
    @classmethod
    def _bounds_reach_tail(cls, v: int) -> int:
        """Ensure bound tables cover the grades used by the tail constraints."""
        if v < 3:
            raise ValueError("EVM_VERIFIER_BOUNDS_MAX_GRADE must be at least 3")
        return v


class DevConfig(BaseConfig):
    """Development configuration."""

    model_config: ClassVar[SettingsConfigDict] = SettingsConfigDict(
        env_file=".env.dev",
        extra="ignore",
    )

    @field_validator("EVM_VERIFIER_DEBUG")
    @classmethod
    def _enforce_debug_true(cls, v: bool) -> bool:
        """Ensure EVM_VERIFIER_DEBUG is True in development."""
        if not v:
            raise ValueError("EVM_VERIFIER_DEBUG must be True in development")
        return v


class TestConfig(BaseConfig):
    """Testing configuration."""

    model_config: ClassVar[SettingsConfigDict] = SettingsConfigDict(
        env_file=None,
        extra="ignore",
    )

    @field_validator("EVM_VERIFIER_DEBUG")
    @classmethod
    def _enforce_debug_false(cls, v: bool) -> bool:
        """Ensure EVM_VERIFIER_DEBUG is False in testing."""
        if v:
            raise ValueError("EVM_VERIFIER_DEBUG must be False in testing")
        return v


class ProdConfig(BaseConfig):
    """Production configuration."""

    model_config: ClassVar[SettingsConfigDict] = SettingsConfigDict(
        env_file=None,
        extra="ignore",
    )

    @field_validator("EVM_VERIFIER_DEBUG")
    @classmethod
    def _enforce_debug_false(cls, v: bool) -> bool:
        """Ensure DEBUG is False in production."""
        if v:
            raise ValueError("EVM_VERIFIER_DEBUG must be False in production")
        return v


# Cache config instance to avoid recreating settings on every import.
@lru_cache
def get_settings() -> BaseConfig:
    """Return singleton config by EVM_VERIFIER_ENV (prod when unset)."""
    env = os.getenv("EVM_VERIFIER_ENV") or "prod"

    match env.lower():
        case "dev":
            return DevConfig()
        case "test":
            return TestConfig()
        case "prod":
            return ProdConfig()
        case _:
            raise ValueError(f"Unknown EVM_VERIFIER_ENV value: {env.lower()}")
