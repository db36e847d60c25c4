"""
ChiPredict - Configuration loader.
Numerical and run settings, and the flat JSON file accepted by --config.
"""

import json
import logging
import os
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, ValidationError

from chipredict.models.numerics import QuadSettings

logger = logging.getLogger(__name__)

VALID_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


@dataclass
class Config:
    """Run configuration; every setting can be overridden from a --config file."""

    # Quadrature
    QUAD_REL_TOL: float = 1e-10
    QUAD_ABS_TOL: float = 1e-12
    QUAD_MAX_LEVEL: int = 12
    SMALL_Q_THRESHOLD: float = 1e-8

    # Dominance checks
    VERDICT_TOLERANCE: float = 1e-9

    # Risk
    POISSON_TAIL_MASS: float = 1e-12
    DEFAULT_SEED: int = 20210901
    DEFAULT_REPS: int = 20000
    FULL_REPS: int = 100000
    WORKERS: int = 1
    BLOCK_SIZE: int = 1000

    # Logging
    LOG_LEVEL: str = "WARNING"
    LOG_FILE: str = ""
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    def __post_init__(self):
        self._validate()

    def _validate(self):
        """Validate configuration values."""
        errors = []

        if not self.QUAD_REL_TOL > 0:
            errors.append(f"QUAD_REL_TOL must be positive, got {self.QUAD_REL_TOL}")
        if not self.QUAD_ABS_TOL > 0:
            errors.append(f"QUAD_ABS_TOL must be positive, got {self.QUAD_ABS_TOL}")
        if self.QUAD_MAX_LEVEL < 1:
            errors.append(f"QUAD_MAX_LEVEL must be at least 1, got {self.QUAD_MAX_LEVEL}")
        if not 0 < self.SMALL_Q_THRESHOLD < 1:
            errors.append(f"SMALL_Q_THRESHOLD must lie in (0, 1), got {self.SMALL_Q_THRESHOLD}")
        if self.VERDICT_TOLERANCE < 0:
            errors.append(f"VERDICT_TOLERANCE must be nonnegative, got {self.VERDICT_TOLERANCE}")
        if not 0 < self.POISSON_TAIL_MASS < 1:
            errors.append(f"POISSON_TAIL_MASS must lie in (0, 1), got {self.POISSON_TAIL_MASS}")
        if self.DEFAULT_SEED < 0:
            errors.append(f"DEFAULT_SEED must be nonnegative, got {self.DEFAULT_SEED}")
        for name in ("DEFAULT_REPS", "FULL_REPS", "WORKERS", "BLOCK_SIZE"):
            if getattr(self, name) < 1:
                errors.append(f"{name} must be at least 1, got {getattr(self, name)}")
        if self.LOG_LEVEL.upper() not in VALID_LOG_LEVELS:
            errors.append(f"LOG_LEVEL must be one of {VALID_LOG_LEVELS}")

        for error in errors:
            logger.error(f"Configuration error: {error}")

        if errors:
            raise ValueError(f"Configuration validation failed: {'; '.join(errors)}")

    def quad_settings(self) -> QuadSettings:
        return QuadSettings(
            rel_tol=self.QUAD_REL_TOL,
            abs_tol=self.QUAD_ABS_TOL,
            max_refinement_level=self.QUAD_MAX_LEVEL,
            small_q_threshold=self.SMALL_Q_THRESHOLD,
        )

    def to_public_dict(self) -> Dict:
        """Settings that influence results (logging excluded)."""
        return {k: v for k, v in asdict(self).items() if not k.startswith("LOG_")}


class ConfigFile(BaseModel):
    """
    Flat JSON accepted by --config.

    Lowercase keys give defaults for the matching command-line flags;
    UPPER_CASE keys override Config settings. Unknown keys are rejected.
    """
    model_config = ConfigDict(extra="forbid")

    # flag defaults
    prior: Optional[str] = None
    b_mode: Optional[str] = None
    b: Optional[float] = None
    a: Optional[float] = None
    n1: Optional[float] = None
    n2: Optional[float] = None
    p: Optional[int] = None
    v: Optional[float] = None
    w: Optional[float] = None
    xnormsq: Optional[float] = None
    theta: Optional[Union[float, List[float]]] = None
    reps: Optional[int] = None
    seed: Optional[int] = None
    tol: Optional[float] = None
    workers: Optional[int] = None
    out: Optional[str] = None
    paper_scale: Optional[bool] = None
    semi_analytic: Optional[bool] = None

    # settings
    QUAD_REL_TOL: Optional[float] = None
    QUAD_ABS_TOL: Optional[float] = None
    QUAD_MAX_LEVEL: Optional[int] = None
    SMALL_Q_THRESHOLD: Optional[float] = None
    VERDICT_TOLERANCE: Optional[float] = None
    POISSON_TAIL_MASS: Optional[float] = None
    DEFAULT_SEED: Optional[int] = None
    DEFAULT_REPS: Optional[int] = None
    FULL_REPS: Optional[int] = None
    WORKERS: Optional[int] = None
    BLOCK_SIZE: Optional[int] = None
    LOG_LEVEL: Optional[str] = None
    LOG_FILE: Optional[str] = None
    LOG_FORMAT: Optional[str] = None

    def flag_defaults(self) -> Dict[str, Any]:
        return {k: v for k, v in self.model_dump().items() if not k.isupper() and v is not None}

    def settings(self) -> Dict[str, Any]:
        return {k: v for k, v in self.model_dump().items() if k.isupper() and v is not None}


def load_config(path: Optional[str] = None) -> Tuple[Config, Dict[str, Any]]:
    """
    Build the Config and the flag defaults from an optional JSON file.

    Raises:
        ValueError: if the file is missing, is not JSON, or holds unknown or
            ill-typed keys.
    """
    if not path:
        return Config(), {}
    if not os.path.exists(path):
        raise ValueError(f"--config file not found: {path}")

    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
        parsed = ConfigFile.model_validate(raw)
    except json.JSONDecodeError as e:
        raise ValueError(f"--config file {path} is not valid JSON: {e}") from e
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors())
        raise ValueError(f"--config file {path} rejected: {problems}") from e

    return Config(**parsed.settings()), parsed.flag_defaults()
