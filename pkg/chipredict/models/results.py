"""
ChiPredict - Result data models.
Risk estimates, experiment grids, dominance verdicts and run manifests.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from chipredict.errors import DomainError
from chipredict.models.priors import PriorSpec
from chipredict.models.sampling import ModelConfig


@dataclass(frozen=True)
class RiskEstimate:
    """Monte Carlo Kullback-Leibler risk in nats."""
    mean: float
    std_error: float
    reps: int
    seed: int

    @property
    def std_error_defined(self) -> bool:
        return self.reps >= 2 and math.isfinite(self.std_error)

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "reps": self.reps,
            "seed": self.seed,
        }


@dataclass
class ExperimentConfig:
    """Grid of model configurations, priors and noncentralities."""
    configs: List[ModelConfig]
    priors: List[PriorSpec]
    theta_grid: List[float]
    reps: int
    seed: int
    workers: int = 1
    block_size: int = 1000

    def __post_init__(self):
        if not self.configs:
            raise DomainError("experiment needs at least one model configuration", field="configs")
        if not self.priors:
            raise DomainError("experiment needs at least one prior", field="priors")
        if not self.theta_grid:
            raise DomainError("experiment needs at least one theta", field="theta")
        if any(not math.isfinite(t) or t < 0 for t in self.theta_grid):
            raise DomainError(f"theta values must be nonnegative, got {self.theta_grid}", field="theta")
        if self.reps < 1:
            raise DomainError(f"reps must be >= 1, got {self.reps}", field="reps")
        if self.workers < 1:
            raise DomainError(f"workers must be >= 1, got {self.workers}", field="workers")
        if self.block_size < 1:
            raise DomainError(f"block_size must be >= 1, got {self.block_size}", field="block_size")


@dataclass(frozen=True)
class DominanceConstants:
    """The pair (c1, c2) entering the b = n1/2 conditions."""
    c1: float
    c2: float


class VerdictStatus(str, Enum):
    """Outcome of a dominance check."""
    PROVEN_DOMINATES = "ProvenDominates"
    PROVEN_FAILS_NECESSARY = "ProvenFailsNecessary"
    INCONCLUSIVE = "Inconclusive"


class Condition(str, Enum):
    """Sufficient or necessary conditions that can decide a verdict."""
    THM1 = "Thm1"
    COR1I = "Cor1i"
    COR1II = "Cor1ii"
    COR2 = "Cor2"
    THM3 = "Thm3"
    THM4 = "Thm4"


@dataclass(frozen=True)
class DominanceVerdict:
    """
    Result of a dominance check against the reference predictive density.

    margin is RHS - LHS of the deciding inequality, so margin >= -tolerance
    means the inequality holds. Conditions that only test hypotheses
    (Thm3, Thm4) carry no margin. An Inconclusive verdict has no fired_by;
    its margin, if any, is that of the last condition checked.
    """
    holds: VerdictStatus
    fired_by: Optional[Condition] = None
    margin: Optional[float] = None
    tolerance: float = 1e-9
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "holds": self.holds.value,
            "fired_by": self.fired_by.value if self.fired_by else None,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


class RunManifest(BaseModel):
    """Provenance record written next to result tables."""
    model_config = ConfigDict(frozen=True)

    tool_version: str
    seed: int
    timestamp: str
    config_digest: str
    command: str = ""
    settings: Dict[str, Any] = Field(default_factory=dict)
