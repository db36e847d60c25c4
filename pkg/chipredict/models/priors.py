"""
ChiPredict - Prior data models.
Reference prior and the hierarchical shrinkage prior family.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from chipredict.errors import DomainError
from chipredict.models.sampling import ModelConfig


class PriorKind(str, Enum):
    """Prior families."""
    REFERENCE = "ref"
    HIERARCHICAL = "hier"


class BMode(str, Enum):
    """How the hyperparameter b is chosen."""
    HALF = "half"        # b = n1/2
    ONE = "one"          # b = 1
    GENERAL = "general"  # b given explicitly


@dataclass(frozen=True)
class HyperParams:
    """Hyperparameters (b, a) of the hierarchical prior."""
    a: float
    b_mode: BMode = BMode.GENERAL
    b: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "b_mode", BMode(self.b_mode))
        if not math.isfinite(self.a):
            raise DomainError(f"a must be finite, got {self.a}", field="a")
        if self.b_mode is BMode.GENERAL:
            if self.b is None or not math.isfinite(self.b) or self.b <= 0:
                raise DomainError(f"b must be positive when b_mode is general, got {self.b}", field="b")
        elif self.b_mode is BMode.ONE and self.b is not None and self.b != 1:
            raise DomainError(f"b_mode 'one' fixes b = 1, got b = {self.b}", field="b")

    def resolve_b(self, config: ModelConfig) -> float:
        if self.b_mode is BMode.HALF:
            return config.k
        if self.b_mode is BMode.ONE:
            return 1.0
        return float(self.b)

    def validate_for(self, config: ModelConfig) -> None:
        config.check_a(self.a)
        if self.b_mode is BMode.HALF and self.b is not None and not math.isclose(self.b, config.k):
            raise DomainError(f"b_mode 'half' fixes b = n1/2 = {config.k}, got b = {self.b}", field="b")


@dataclass(frozen=True)
class PriorSpec:
    """Either the reference prior or a hierarchical prior with hyperparameters."""
    kind: PriorKind = PriorKind.REFERENCE
    hyper: Optional[HyperParams] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", PriorKind(self.kind))
        if self.kind is PriorKind.HIERARCHICAL and self.hyper is None:
            raise DomainError("hierarchical prior needs hyperparameters", field="prior")
        if self.kind is PriorKind.REFERENCE and self.hyper is not None:
            raise DomainError("reference prior takes no hyperparameters", field="prior")

    @classmethod
    def reference(cls) -> "PriorSpec":
        return cls(PriorKind.REFERENCE)

    @classmethod
    def hierarchical(cls, a: float, b_mode: BMode = BMode.GENERAL, b: Optional[float] = None) -> "PriorSpec":
        return cls(PriorKind.HIERARCHICAL, HyperParams(a=a, b_mode=b_mode, b=b))

    @property
    def is_reference(self) -> bool:
        return self.kind is PriorKind.REFERENCE

    def label(self) -> str:
        if self.is_reference:
            return "ref"
        if self.hyper.b is None:
            return f"{self.hyper.b_mode.value}(a={self.hyper.a})"
        return f"{self.hyper.b_mode.value}(b={self.hyper.b}, a={self.hyper.a})"
