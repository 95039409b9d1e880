"""Run-wide limits for the searches, scans and projections.

Every field reads a ``QFACTORIAL_*`` variable; a value that is missing,
malformed or out of range falls back to the default.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Optional, Tuple

from dotenv import load_dotenv

_PREFIX = "QFACTORIAL_"
_PROJECT_ROOT = Path(__file__).resolve().parents[2]

# first file wins; the process environment beats all of them
for _name in (".env.local", ".env"):
    _path = _PROJECT_ROOT / _name
    if _path.exists():
        load_dotenv(dotenv_path=_path, override=False)


def _env(name: str) -> Optional[str]:
    return os.getenv(_PREFIX + name)


def _positive(name: str, default: int) -> int:
    try:
        value = int(_env(name) or "")
    except ValueError:
        return default
    return value if value > 0 else default


def _prime_pair(name: str, default: Tuple[int, int]) -> Tuple[int, int]:
    """Two comma-separated moduli for the base-locus checks, e.g. ``5,29``."""
    raw = _env(name) or ""
    parts = [part.strip() for part in raw.split(",") if part.strip()]
    if len(parts) != 2 or not all(part.isdigit() and int(part) > 1 for part in parts):
        return default
    return int(parts[0]), int(parts[1])


@dataclass(frozen=True)
class Settings:
    """Limits shared by the pipeline and the command line.

    Commands never mutate the cached instance; flag overrides go through
    ``dataclasses.replace``.
    """

    title: str = "qfactorial"
    description: str = "Q-factoriality of nodal double solids and nodal hypersurfaces in P^4"
    version: str = "0.1.0"

    # exact curve search
    search_budget: int = field(default_factory=lambda: _positive("SEARCH_BUDGET", 2_000_000))
    max_points: int = field(default_factory=lambda: _positive("MAX_POINTS", 60))
    max_curve_degree: int = field(default_factory=lambda: _positive("MAX_CURVE_DEGREE", 3))

    # point scans over F_p
    scan_budget: int = field(default_factory=lambda: _positive("SCAN_BUDGET", 2_000_000))
    probe_primes: Tuple[int, int] = field(default_factory=lambda: _prime_pair("PROBE_PRIMES", (5, 29)))

    # projection centers: attempts, starting coordinate bound, attempts before it doubles
    projection_attempts: int = field(default_factory=lambda: _positive("PROJECTION_ATTEMPTS", 64))
    projection_bound: int = field(default_factory=lambda: _positive("PROJECTION_BOUND", 1000))
    attempts_per_round: int = field(default_factory=lambda: _positive("ATTEMPTS_PER_ROUND", 8))

    workers: int = field(default_factory=lambda: _positive("WORKERS", 1))
    log_level: str = field(default_factory=lambda: (_env("LOG_LEVEL") or "WARNING").upper())


@lru_cache
def get_settings() -> Settings:
    """Settings read from the environment once per process."""
    return Settings()
