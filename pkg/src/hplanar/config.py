"""Configuration management."""

import os
from dataclasses import dataclass
from typing import Optional

# Default ceilings for exponential routines
DEFAULT_SUBSET_CEILING = 22
DEFAULT_MINOR_CEILING = 8
DEFAULT_MODULATOR_CEILING = 26
DEFAULT_PTD_CEILING = 14
DEFAULT_PMM_CEILING = 18
DEFAULT_COLOR_CEILING = 40
DEFAULT_INDEPENDENT_CEILING = 40
DEFAULT_SAT_CEILING = 20
DEFAULT_FORBIDDEN_CEILING = 6
DEFAULT_PERFECT_CEILING = 18
DEFAULT_HARNESS_CEILING = 40


def parse_ceiling(raw: str) -> Optional[int]:
    """Parse a ceiling value; "none" or "off" disables the ceiling."""
    if raw.strip().lower() in ("none", "off", ""):
        return None
    return int(raw)


@dataclass
class Config:
    """Application configuration."""

    # Ceilings
    subset_ceiling: Optional[int] = DEFAULT_SUBSET_CEILING
    minor_ceiling: Optional[int] = DEFAULT_MINOR_CEILING
    modulator_ceiling: Optional[int] = DEFAULT_MODULATOR_CEILING
    ptd_ceiling: Optional[int] = DEFAULT_PTD_CEILING
    pmm_ceiling: Optional[int] = DEFAULT_PMM_CEILING
    color_ceiling: Optional[int] = DEFAULT_COLOR_CEILING
    sat_ceiling: Optional[int] = DEFAULT_SAT_CEILING
    forbidden_ceiling: Optional[int] = DEFAULT_FORBIDDEN_CEILING
    harness_ceiling: Optional[int] = DEFAULT_HARNESS_CEILING

    # Randomness and parallelism
    seed: int = 0
    threads: int = 1

    # Output
    output_format: str = "text"  # text or json

    # Harness ledger
    ledger_path: str = "hplanar.db"

    @classmethod
    def from_env(cls) -> "Config":
        """Load configuration from environment variables."""
        config = cls()

        config.subset_ceiling = parse_ceiling(
            os.getenv("HPLANAR_SUBSET_CEILING", str(DEFAULT_SUBSET_CEILING))
        )
        config.minor_ceiling = parse_ceiling(
            os.getenv("HPLANAR_MINOR_CEILING", str(DEFAULT_MINOR_CEILING))
        )
        config.modulator_ceiling = parse_ceiling(
            os.getenv("HPLANAR_MODULATOR_CEILING", str(DEFAULT_MODULATOR_CEILING))
        )
        config.ptd_ceiling = parse_ceiling(os.getenv("HPLANAR_PTD_CEILING", str(DEFAULT_PTD_CEILING)))
        config.pmm_ceiling = parse_ceiling(os.getenv("HPLANAR_PMM_CEILING", str(DEFAULT_PMM_CEILING)))
        config.color_ceiling = parse_ceiling(
            os.getenv("HPLANAR_COLOR_CEILING", str(DEFAULT_COLOR_CEILING))
        )
        config.sat_ceiling = parse_ceiling(os.getenv("HPLANAR_SAT_CEILING", str(DEFAULT_SAT_CEILING)))
        config.forbidden_ceiling = parse_ceiling(
            os.getenv("HPLANAR_FORBIDDEN_CEILING", str(DEFAULT_FORBIDDEN_CEILING))
        )
        config.harness_ceiling = parse_ceiling(
            os.getenv("HPLANAR_HARNESS_CEILING", str(DEFAULT_HARNESS_CEILING))
        )

        config.seed = int(os.getenv("HPLANAR_SEED", "0"))
        config.threads = max(1, int(os.getenv("HPLANAR_THREADS", "1")))
        config.output_format = os.getenv("HPLANAR_OUTPUT_FORMAT", "text").lower()
        config.ledger_path = os.getenv("HPLANAR_LEDGER_PATH", "hplanar.db")

        return config
