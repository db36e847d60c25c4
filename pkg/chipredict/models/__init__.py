"""
ChiPredict - Data models package.
"""

from chipredict.models.numerics import QuadSettings
from chipredict.models.priors import BMode, HyperParams, PriorKind, PriorSpec
from chipredict.models.results import (
    Condition,
    DominanceConstants,
    DominanceVerdict,
    ExperimentConfig,
    RiskEstimate,
    RunManifest,
    VerdictStatus,
)
from chipredict.models.sampling import ModelConfig, Observation, ShapeParams, SimulationPoint

__all__ = [
    "BMode",
    "Condition",
    "DominanceConstants",
    "DominanceVerdict",
    "ExperimentConfig",
    "HyperParams",
    "ModelConfig",
    "Observation",
    "PriorKind",
    "PriorSpec",
    "QuadSettings",
    "RiskEstimate",
    "RunManifest",
    "ShapeParams",
    "SimulationPoint",
    "VerdictStatus",
]
