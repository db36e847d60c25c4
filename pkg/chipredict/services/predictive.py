"""
ChiPredict - Bayesian predictive densities.
Log predictive densities of W under the reference prior and the hierarchical
shrinkage prior, with specialized evaluators for b = n1/2 and b = 1.
"""

import logging
import math
from dataclasses import replace
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy import special

from chipredict.errors import DomainError
from chipredict.models.numerics import QuadSettings
from chipredict.models.priors import BMode, HyperParams, PriorSpec
from chipredict.models.sampling import ArrayOrFloat, ModelConfig, Observation
from chipredict.services.quadrature import integrate_beta_weighted
from chipredict.services.specfn import log_reg_inc_beta

logger = logging.getLogger(__name__)

# Relative tolerance for recognising b = 1, b = n1/2 and a = p/2 - 1.
SPECIAL_CASE_RTOL = 1e-12
_SMALLEST_ABS_TOL = 1e-300


class Evaluator(str, Enum):
    """Evaluation paths of the dispatcher."""
    REFERENCE = "ref"
    CLOSED = "closed"
    B_ONE = "b1"
    HALF = "half"
    GENERAL = "general"


def _output(value: np.ndarray) -> ArrayOrFloat:
    return float(value) if np.ndim(value) == 0 else value


def _arrays(w: ArrayOrFloat, obs: Observation) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    w = np.asarray(w, dtype=float)
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise DomainError("w must be positive and finite", field="w")
    x = np.asarray(obs.x_norm_sq, dtype=float)
    v = np.asarray(obs.v, dtype=float)
    return np.broadcast_arrays(w, x, v)


def _ref_log(w: np.ndarray, v: np.ndarray, config: ModelConfig) -> np.ndarray:
    k, l = config.k, config.l
    return -special.betaln(k, l) + k * np.log(v) + (l - 1.0) * np.log(w) - (k + l) * np.log(v + w)


def ref_log_predictive(w: ArrayOrFloat, obs: Observation, config: ModelConfig) -> ArrayOrFloat:
    """
    Log predictive density under the reference prior 1/eta.

    V^k w^(l-1) (V+w)^-(k+l) / B(k, l); does not depend on ||x||^2.
    """
    w, _, v = _arrays(w, obs)
    return _output(_ref_log(w, v, config))


def _log_shrinkage_integral(
    c: np.ndarray,
    power: float,
    alpha: float,
    beta: float,
    settings: Optional[QuadSettings] = None,
) -> np.ndarray:
    """
    ln int_0^1 gamma^(alpha-1) (1-gamma)^(beta-1) (1 + c gamma)^-power d gamma.

    With gamma = (1-r)/(1 + c r) the integral becomes
    (1+c)^-alpha int r^(beta-1) (1-r)^(alpha-1) (1/(1+c) + c r/(1+c))^e dr,
    e = power - alpha - beta. The remaining integral is bounded below by
    Beta functions whatever c is; the absolute tolerance is scaled by that
    bound.
    """
    settings = settings or QuadSettings()
    c = np.asarray(c, dtype=float)
    eps = 1.0 / (1.0 + c)
    t = c * eps
    e = power - alpha - beta

    if e > 0:
        with np.errstate(divide="ignore"):
            log_bound = np.maximum(
                e * np.log(t) + special.betaln(beta + e, alpha),
                e * np.log(eps) + special.betaln(beta, alpha),
            )
    else:
        log_bound = np.full(c.shape, special.betaln(beta, alpha))
    scale = math.exp(min(0.0, float(np.min(log_bound, initial=0.0))))
    scaled = replace(settings, abs_tol=max(settings.abs_tol * scale, _SMALLEST_ABS_TOL))

    integral = integrate_beta_weighted(
        lambda r: np.exp(e * np.log(np.multiply.outer(r, t) + eps)),
        beta,
        alpha,
        scaled,
    )
    return -alpha * np.log1p(c) + np.log(integral)


def hier_log_predictive_general(
    w: ArrayOrFloat,
    obs: Observation,
    hp: HyperParams,
    config: ModelConfig,
    settings: Optional[QuadSettings] = None,
) -> ArrayOrFloat:
    """
    Log predictive density under the hierarchical prior for any admissible (b, a).

    Both gamma-integrals have the form
    int gamma^(m'-1) (1-gamma)^(b-1) (1 + c gamma)^-power d gamma
    and are evaluated by _log_shrinkage_integral after pulling out
    (V+w)^-power and V^-power.
    """
    hp.validate_for(config)
    b = hp.resolve_b(config)
    k, l, m_prime = config.k, config.l, config.m - hp.a
    w, x, v = _arrays(w, obs)

    num_power = k + l + m_prime
    den_power = k + m_prime
    log_num = _log_shrinkage_integral(x / (v + w), num_power, m_prime, b, settings)
    log_den = _log_shrinkage_integral(x / v, den_power, m_prime, b, settings)
    value = (
        (l - 1.0) * np.log(w)
        - special.betaln(k + m_prime, l)
        - num_power * np.log(v + w)
        + den_power * np.log(v)
        + log_num
        - log_den
    )
    return _output(value)


def hier_log_predictive_half(
    w: ArrayOrFloat,
    obs: Observation,
    a: float,
    config: ModelConfig,
    settings: Optional[QuadSettings] = None,
) -> ArrayOrFloat:
    """
    Log predictive density for b = n1/2.

    The denominator integral is B(k, m') V^-k (V+||x||^2)^-m'. The numerator
    reduces to (V+w)^-(k+l) (V+w+||x||^2)^-m' times
    int gamma^(m'-1) (1-gamma)^(k-1) (1 - c gamma)^l with c = ||x||^2/(V+w+||x||^2).
    """
    config.check_a(a)
    k, l, m_prime = config.k, config.l, config.m - a
    w, x, v = _arrays(w, obs)
    c = x / (v + w + x)

    smooth = integrate_beta_weighted(
        lambda g: np.exp(l * np.log1p(-np.multiply.outer(g, c))),
        m_prime,
        k,
        settings,
    )
    value = (
        (l - 1.0) * np.log(w)
        - special.betaln(k + m_prime, l)
        - (k + l) * np.log(v + w)
        - m_prime * np.log(v + w + x)
        + np.log(smooth)
        - special.betaln(k, m_prime)
        + k * np.log(v)
        + m_prime * np.log(v + x)
    )
    return _output(value)


def _b1_log_ratio(
    w: np.ndarray,
    x: np.ndarray,
    v: np.ndarray,
    a: float,
    config: ModelConfig,
    small_q_threshold: float,
) -> np.ndarray:
    k, l, m_prime = config.k, config.l, config.m - a
    with np.errstate(divide="ignore", invalid="ignore"):
        q_num = x / (v + w + x)
        q_den = x / (v + x)
    ratio = np.empty(np.shape(w))

    small = q_den < small_q_threshold
    if np.any(small):
        ws, xs, vs = w[small], x[small], v[small]
        qn, qd = q_num[small], q_den[small]
        # ln x cancels between the two leading terms
        ratio[small] = (
            m_prime * (np.log(vs + xs) - np.log(vs + ws + xs))
            + (k + l) * (np.log(vs + ws) - np.log(vs + ws + xs))
            - k * (np.log(vs) - np.log(vs + xs))
            - special.betaln(m_prime, k + l)
            + special.betaln(m_prime, k)
            + np.log1p((m_prime + k + l) / (m_prime + 1.0) * qn)
            - np.log1p((m_prime + k) / (m_prime + 1.0) * qd)
        )
    rest = ~small
    if np.any(rest):
        ratio[rest] = (
            np.asarray(log_reg_inc_beta(q_num[rest], m_prime, k + l, small_q_threshold))
            - np.asarray(log_reg_inc_beta(q_den[rest], m_prime, k, small_q_threshold))
        )
    return ratio


def hier_log_predictive_b1(
    w: ArrayOrFloat,
    obs: Observation,
    a: float,
    config: ModelConfig,
    settings: Optional[QuadSettings] = None,
) -> ArrayOrFloat:
    """
    Log predictive density for b = 1.

    Reference density times I_qn(m', k+l) / I_qd(m', k), with
    qn = ||x||^2/(V+w+||x||^2) and qd = ||x||^2/(V+||x||^2). When qd is below
    the small-q threshold both incomplete betas use their leading terms.
    """
    config.check_a(a)
    settings = settings or QuadSettings()
    w, x, v = _arrays(w, obs)
    value = _ref_log(w, v, config) + _b1_log_ratio(w, x, v, a, config, settings.small_q_threshold)
    return _output(value)


def hier_log_predictive_closed(
    w: ArrayOrFloat,
    obs: Observation,
    config: ModelConfig,
    settings: Optional[QuadSettings] = None,
) -> ArrayOrFloat:
    """
    Closed form for b = 1 and a = p/2 - 1 (p >= 2).

    Reference density times
    [1 - ((V+w)/(V+w+||x||^2))^(k+l)] / [1 - (V/(V+||x||^2))^k].
    """
    if config.p < 2:
        raise DomainError(f"closed form needs p >= 2, got p = {config.p}", field="p")
    settings = settings or QuadSettings()
    k, l = config.k, config.l
    w, x, v = _arrays(w, obs)

    u_num = x / (v + w)
    u_den = x / v
    ratio = np.empty(np.shape(w))

    small = u_den < settings.small_q_threshold
    if np.any(small):
        un, ud = u_num[small], u_den[small]
        # 1 - (1+u)^-n = n u (1 - (n+1) u / 2) + O(u^3)
        ratio[small] = (
            math.log((k + l) / k)
            + np.log(v[small])
            - np.log(v[small] + w[small])
            + np.log1p(-(k + l + 1.0) * un / 2.0)
            - np.log1p(-(k + 1.0) * ud / 2.0)
        )
    rest = ~small
    if np.any(rest):
        ratio[rest] = (
            np.log(-np.expm1(-(k + l) * np.log1p(u_num[rest])))
            - np.log(-np.expm1(-k * np.log1p(u_den[rest])))
        )
    return _output(_ref_log(w, v, config) + ratio)


def select_evaluator(prior: PriorSpec, config: ModelConfig) -> Evaluator:
    """Most specialized evaluator consistent with the prior's (b, a)."""
    if prior.is_reference:
        return Evaluator.REFERENCE
    hp = prior.hyper
    hp.validate_for(config)
    b = hp.resolve_b(config)
    is_one = hp.b_mode is BMode.ONE or (
        hp.b_mode is BMode.GENERAL and math.isclose(b, 1.0, rel_tol=SPECIAL_CASE_RTOL)
    )
    is_half = hp.b_mode is BMode.HALF or (
        hp.b_mode is BMode.GENERAL and math.isclose(b, config.k, rel_tol=SPECIAL_CASE_RTOL)
    )
    if is_one:
        if config.p >= 2 and math.isclose(hp.a, config.m - 1.0, rel_tol=0.0, abs_tol=SPECIAL_CASE_RTOL):
            return Evaluator.CLOSED
        return Evaluator.B_ONE
    if is_half:
        return Evaluator.HALF
    return Evaluator.GENERAL


def log_predictive(
    w: ArrayOrFloat,
    obs: Observation,
    prior: PriorSpec,
    config: ModelConfig,
    settings: Optional[QuadSettings] = None,
) -> ArrayOrFloat:
    """Dispatch to the most specialized evaluator for the prior."""
    evaluator = select_evaluator(prior, config)
    if evaluator is Evaluator.REFERENCE:
        return ref_log_predictive(w, obs, config)
    a = prior.hyper.a
    if evaluator is Evaluator.CLOSED:
        return hier_log_predictive_closed(w, obs, config, settings)
    if evaluator is Evaluator.B_ONE:
        return hier_log_predictive_b1(w, obs, a, config, settings)
    if evaluator is Evaluator.HALF:
        return hier_log_predictive_half(w, obs, a, config, settings)
    return hier_log_predictive_general(w, obs, prior.hyper, config, settings)
