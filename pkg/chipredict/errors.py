"""
ChiPredict - Error types.
Validation failures and numerical failures raised by the services.
"""

from typing import Any, Optional


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class NumericalError(RuntimeError):
    """A numerical procedure did not deliver the requested accuracy."""


class QuadratureError(NumericalError):
    """Tanh-sinh refinement stopped before reaching the tolerance."""

    def __init__(self, message: str, estimate: Any = None, error_bound: Any = None, level: int = 0):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound
        self.level = level


class ConvergenceError(NumericalError):
    """An iterative solver ran out of iterations."""

    def __init__(self, message: str, iterations: int = 0, residual: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class RiskEvaluationError(NumericalError):
    """Some Monte Carlo replications could not be evaluated."""

    def __init__(self, message: str, failed: int = 0, reps: int = 0):
        super().__init__(message)
        self.failed = failed
        self.reps = reps
