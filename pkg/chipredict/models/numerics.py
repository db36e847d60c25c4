"""
ChiPredict - Numerical settings.
"""

import math
from dataclasses import asdict, dataclass

from chipredict.errors import DomainError


@dataclass(frozen=True)
class QuadSettings:
    """Tolerances for the tanh-sinh rule and the small-q incomplete beta branch."""
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_refinement_level: int = 12
    small_q_threshold: float = 1e-8

    def __post_init__(self):
        if not (math.isfinite(self.rel_tol) and self.rel_tol > 0):
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}", field="rel_tol")
        if not (math.isfinite(self.abs_tol) and self.abs_tol > 0):
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}", field="abs_tol")
        if int(self.max_refinement_level) != self.max_refinement_level or self.max_refinement_level < 1:
            raise DomainError(
                f"max_refinement_level must be an integer >= 1, got {self.max_refinement_level}",
                field="max_refinement_level",
            )
        if not 0 < self.small_q_threshold < 1:
            raise DomainError(
                f"small_q_threshold must lie in (0, 1), got {self.small_q_threshold}",
                field="small_q_threshold",
            )

    def to_dict(self) -> dict:
        return asdict(self)
