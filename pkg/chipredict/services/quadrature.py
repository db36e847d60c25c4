"""
ChiPredict - Tanh-sinh quadrature.
Beta-weighted integrals over (0, 1) whose endpoint singularities are absorbed
by the double-exponential substitution gamma = expit(pi * sinh(t)).
"""

import logging
import math
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import expit

from chipredict.errors import DomainError, QuadratureError
from chipredict.models.numerics import QuadSettings

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], Union[float, np.ndarray]]

# Nodes are kept while alpha*|u| (or beta*|u|) stays below this many e-folds.
_DECAY_EFOLDS = 60.0
_MIN_LEVEL = 3
_CHUNK = 4096
_TINY = np.finfo(float).tiny


def _check_exponent(value: float, name: str) -> None:
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive and finite, got {value}", field=name)


def truncation_point(alpha: float, beta: float) -> float:
    """Half-width of the t-interval outside which the weight is negligible."""
    u_max = _DECAY_EFOLDS / min(alpha, beta, 1.0)
    return float(np.arcsinh(u_max / math.pi))


def node_weights(t: np.ndarray, alpha: float, beta: float):
    """
    Abscissae and weights of the transformed rule at points t.

    The weight is gamma^alpha * (1 - gamma)^beta * pi * cosh(t), evaluated
    in log-space so that nodes piled up against 0 or 1 never overflow.
    """
    u = math.pi * np.sinh(t)
    log_gamma = -np.logaddexp(0.0, -u)
    log_complement = -np.logaddexp(0.0, u)
    log_weight = np.log(math.pi * np.cosh(t)) + alpha * log_gamma + beta * log_complement
    gamma = np.clip(expit(u), _TINY, 1.0)
    return gamma, np.exp(log_weight)


def _weighted_sum(f: Integrand, t: np.ndarray, alpha: float, beta: float):
    total = None
    for start in range(0, t.size, _CHUNK):
        gamma, weight = node_weights(t[start:start + _CHUNK], alpha, beta)
        keep = weight > 0.0
        if not np.any(keep):
            continue
        values = np.asarray(f(gamma[keep]), dtype=float)
        if values.ndim == 0:
            values = np.full(int(keep.sum()), float(values))
        part = np.tensordot(weight[keep], values, axes=(0, 0))
        total = part if total is None else total + part
    return 0.0 if total is None else total


def _odd_indices(n: int) -> np.ndarray:
    top = n if n % 2 else n - 1
    return np.arange(-top, top + 1, 2, dtype=float)


def integrate_beta_weighted(
    f: Integrand,
    alpha: float,
    beta: float,
    settings: Optional[QuadSettings] = None,
):
    """
    Evaluate the integral of gamma^(alpha-1) (1-gamma)^(beta-1) f(gamma) over (0, 1).

    Args:
        f: Vectorized integrand. Called with a 1-d array of abscissae; may
            return an array of the same length or one of shape
            (len(gamma), *batch) to integrate a batch of integrands at once.
        alpha: Exponent at 0 (positive).
        beta: Exponent at 1 (positive).
        settings: Tolerances; defaults to QuadSettings().

    Returns:
        float, or an ndarray of the batch shape.

    Raises:
        QuadratureError: if max_refinement_level halvings of the step do not
            reach max(abs_tol, rel_tol * |estimate|) for every batch member.
    """
    settings = settings or QuadSettings()
    _check_exponent(alpha, "alpha")
    _check_exponent(beta, "beta")

    t_max = truncation_point(alpha, beta)
    h = 1.0
    n = int(math.ceil(t_max / h))
    total = _weighted_sum(f, np.arange(-n, n + 1, dtype=float) * h, alpha, beta)
    estimate = h * total
    error = np.inf

    for level in range(1, settings.max_refinement_level + 1):
        h *= 0.5
        n = int(math.ceil(t_max / h))
        total = total + _weighted_sum(f, _odd_indices(n) * h, alpha, beta)
        refined = h * total
        error = np.abs(refined - estimate)
        estimate = refined

        if not np.all(np.isfinite(refined)):
            raise QuadratureError(
                f"non-finite quadrature estimate at level {level}",
                estimate=refined,
                error_bound=error,
                level=level,
            )
        bound = np.maximum(settings.abs_tol, settings.rel_tol * np.abs(refined))
        if level >= _MIN_LEVEL and np.all(error <= bound):
            if level > 8:
                logger.debug(f"tanh-sinh converged at level {level} (alpha={alpha}, beta={beta})")
            return float(refined) if np.ndim(refined) == 0 else refined

    raise QuadratureError(
        f"tanh-sinh did not converge after {settings.max_refinement_level} levels "
        f"(alpha={alpha}, beta={beta}, max error {float(np.max(error)):.3g})",
        estimate=estimate,
        error_bound=error,
        level=settings.max_refinement_level,
    )
