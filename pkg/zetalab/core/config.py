from pydantic import ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Literal, Optional
from dotenv import load_dotenv, dotenv_values

from zetalab.core.errors import UsageError

load_dotenv()


class RunConfig(BaseSettings):
    """Run-wide settings; env vars use the ZETALAB_ prefix (e.g. ZETALAB_THREADS)"""
    model_config = SettingsConfigDict(env_prefix="ZETALAB_", extra="ignore")

    PROJECT_NAME: str = "zetalab"
    SIEVE_LIMIT: int = 1_000_000
    MAX_SIEVE_LIMIT: int = 50_000_000
    ZETA_TOLERANCE: float = 1e-12
    CHECK_SLACK: float = 1e-9
    QUAD_TOLERANCE: float = 1e-3
    PERIODIC_TERMS: int = 1_000_000
    H_ENVELOPE_CONSTANT: float = 1.0
    OUTPUT_FORMAT: Literal["csv", "json"] = "json"
    OUTPUT_PATH: str = "-"
    THREADS: int = 1

    @field_validator("SIEVE_LIMIT")
    @classmethod
    def _sieve_limit(cls, v: int) -> int:
        if v < 2:
            raise ValueError("SIEVE_LIMIT must be at least 2")
        return v

    @field_validator("ZETA_TOLERANCE", "CHECK_SLACK", "QUAD_TOLERANCE", "H_ENVELOPE_CONSTANT")
    @classmethod
    def _positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("tolerances must be positive")
        return v

    @field_validator("THREADS", "PERIODIC_TERMS")
    @classmethod
    def _at_least_one(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be at least 1")
        return v


_active: Optional[RunConfig] = None


@lru_cache()
def get_settings() -> RunConfig:
    return _active if _active is not None else RunConfig()


def activate_settings(config: Optional[RunConfig]) -> None:
    """Make `config` what get_settings() returns; None restores environment defaults"""
    global _active
    _active = config
    get_settings.cache_clear()


def load_run_config(config_file: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Merge defaults < environment < key=value file < explicit overrides"""
    values: Dict[str, Any] = {}
    if config_file:
        path = Path(config_file)
        if not path.is_file():
            raise UsageError(f"Config file not found: {config_file}")
        for key, value in dotenv_values(path).items():
            if value is None:
                continue
            name = key.upper()
            if name.startswith("ZETALAB_"):
                name = name[len("ZETALAB_"):]
            values[name] = value
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key.upper()] = value

    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise UsageError(f"Invalid configuration: {e.errors()[0]['msg']}")
