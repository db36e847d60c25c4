"""
ChiPredict - Sampling model data types.
Dimensions of the model, shape shorthands, sufficient data and simulation points.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from chipredict.errors import DomainError

ArrayOrFloat = Union[float, np.ndarray]


def _require_positive(value: float, name: str) -> None:
    if not (isinstance(value, (int, float, np.number)) and math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}", field=name)


@dataclass(frozen=True)
class ModelConfig:
    """Dimension of x and the degrees of freedom of V and W."""
    p: int
    n1: float
    n2: float

    def __post_init__(self):
        if isinstance(self.p, bool) or int(self.p) != self.p or self.p < 1:
            raise DomainError(f"p must be a positive integer, got {self.p!r}", field="p")
        object.__setattr__(self, "p", int(self.p))
        _require_positive(self.n1, "n1")
        _require_positive(self.n2, "n2")

    @property
    def k(self) -> float:
        return self.n1 / 2.0

    @property
    def l(self) -> float:  # noqa: E743
        return self.n2 / 2.0

    @property
    def m(self) -> float:
        return self.p / 2.0

    def check_a(self, a: float) -> None:
        """Raise unless the shrinkage exponent satisfies a < p/2."""
        if not math.isfinite(a) or a >= self.m:
            raise DomainError(f"a must be finite and below p/2 = {self.m}, got {a}", field="a")

    def shape(self, a: float = 0.0) -> "ShapeParams":
        self.check_a(a)
        return ShapeParams(k=self.k, l=self.l, m=self.m, m_prime=self.m - a)

    def to_dict(self) -> dict:
        return {"p": self.p, "n1": self.n1, "n2": self.n2}


@dataclass(frozen=True)
class ShapeParams:
    """Half degrees of freedom: k = n1/2, l = n2/2, m = p/2, m' = p/2 - a."""
    k: float
    l: float  # noqa: E741
    m: float
    m_prime: float

    def __post_init__(self):
        for name in ("k", "l", "m", "m_prime"):
            _require_positive(getattr(self, name), name)


@dataclass(frozen=True)
class Observation:
    """
    Sufficient data (||x||^2, v).

    Both fields may be numpy arrays of a common shape; every predictive
    evaluator broadcasts over them.
    """
    x_norm_sq: ArrayOrFloat
    v: ArrayOrFloat

    def __post_init__(self):
        x = np.asarray(self.x_norm_sq, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if not np.all(np.isfinite(x)) or np.any(x < 0):
            raise DomainError("x_norm_sq must be finite and nonnegative", field="x_norm_sq")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise DomainError("v must be finite and positive", field="v")

    @property
    def is_batch(self) -> bool:
        return np.ndim(self.x_norm_sq) > 0 or np.ndim(self.v) > 0


@dataclass(frozen=True)
class SimulationPoint:
    """Noncentrality theta = eta * ||mu||^2 and the scale eta."""
    theta: float
    eta: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.theta) and self.theta >= 0):
            raise DomainError(f"theta must be finite and nonnegative, got {self.theta}", field="theta")
        _require_positive(self.eta, "eta")
