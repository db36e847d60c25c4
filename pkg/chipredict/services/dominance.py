"""
ChiPredict - Dominance checks.
Sufficient and necessary conditions under which the hierarchical predictive
density dominates the reference one, each returned with its numeric margin.
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy import special

from chipredict.errors import DomainError
from chipredict.models.numerics import QuadSettings
from chipredict.models.priors import PriorSpec
from chipredict.models.results import Condition, DominanceConstants, DominanceVerdict, VerdictStatus
from chipredict.models.sampling import ModelConfig
from chipredict.services.predictive import SPECIAL_CASE_RTOL
from chipredict.services.quadrature import integrate_beta_weighted
from chipredict.services.specfn import digamma_diff

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9


def constants(config: ModelConfig, a: float) -> DominanceConstants:
    """
    The pair (c1, c2).

    n2 <= 2: c1 = G(k) G(k+l+m') / (G(k+l) G(k+m')) - 1, c2 = 1.
    n2 > 2:  c1 = m' / (k+l-1),                          c2 = l.
    """
    config.check_a(a)
    k, l, m_prime = config.k, config.l, config.m - a
    if config.n2 <= 2:
        c1 = math.expm1(
            special.gammaln(k) + special.gammaln(k + l + m_prime) - special.gammaln(k + l) - special.gammaln(k + m_prime)
        )
        return DominanceConstants(c1=float(c1), c2=1.0)
    return DominanceConstants(c1=m_prime / (k + l - 1.0), c2=l)


def shrinkage_kernel(rho: np.ndarray, c1: float, power: float) -> np.ndarray:
    """[1 - (1 + c1 rho)^-power] / rho, continued by power * c1 at rho = 0."""
    rho = np.asarray(rho, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = -np.expm1(-power * np.log1p(c1 * rho)) / rho
    return np.where(rho == 0.0, power * c1, value)


def thm1_integral(config: ModelConfig, c1: float, z: float = 0.0, settings: Optional[QuadSettings] = None) -> float:
    """int_0^1 (1-rho)^(k+l+m+z-1) [1 - (1 + c1 rho)^-(k+l)] / rho d rho."""
    power = config.k + config.l
    return integrate_beta_weighted(
        lambda rho: shrinkage_kernel(rho, c1, power),
        1.0,
        power + config.m + z,
        settings,
    )


def thm1_condition(
    config: ModelConfig,
    a: float,
    settings: Optional[QuadSettings] = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> Tuple[bool, float]:
    """
    Sufficient condition for b = n1/2:

        (m'/c2) [psi(k+l+m) - psi(k+m)] <= int_0^1 (1-rho)^(k+l+m-1) g(rho) d rho.

    Returns (holds, RHS - LHS); margins within tolerance of zero count as holding.
    """
    consts = constants(config, a)
    k, l, m = config.k, config.l, config.m
    lhs = (m - a) / consts.c2 * digamma_diff(k + l + m, k + m)
    rhs = thm1_integral(config, consts.c1, 0.0, settings)
    margin = rhs - lhs
    logger.debug(f"thm1 at {config.to_dict()}, a={a}: lhs={lhs:.12g} rhs={rhs:.12g}")
    return margin >= -tolerance, margin


def cor1_i_condition(config: ModelConfig, a: float, tolerance: float = DEFAULT_TOLERANCE) -> Tuple[bool, float]:
    """
    Closed-form sufficient bound for the b = n1/2 condition:

        psi(k+l+m) - psi(k+m) <= (c2/m') (N+2)/N [1 - (1 + 2 c1/(N+2))^-(k+l)],

    with N = n1 + n2 + p.
    """
    consts = constants(config, a)
    k, l, m, m_prime = config.k, config.l, config.m, config.m - a
    total = config.n1 + config.n2 + config.p
    gap = digamma_diff(k + l + m, k + m)
    rhs = (
        consts.c2
        / m_prime
        * (total + 2.0)
        / total
        * -math.expm1(-(k + l) * math.log1p(2.0 * consts.c1 / (total + 2.0)))
    )
    margin = rhs - gap
    return margin >= -tolerance, margin


def cor1_ii_condition(config: ModelConfig) -> Tuple[bool, float]:
    """
    Strict inequality under which every a close enough to p/2 dominates.

    n2 <= 2: psi(k+l+m) - psi(k+m) < (n1+n2)/(n1+n2+p) [psi(k+l) - psi(k)]
    n2 > 2:  psi(k+l+m) - psi(k+m) < (n1+n2) l / (n1+n2+p) * 2/(n1+n2-2)
    """
    k, l, m = config.k, config.l, config.m
    n = config.n1 + config.n2
    gap = digamma_diff(k + l + m, k + m)
    if config.n2 <= 2:
        rhs = n / (n + config.p) * digamma_diff(k + l, k)
    else:
        rhs = n * l / (n + config.p) * 2.0 / (n - 2.0)
    margin = rhs - gap
    return margin > 0, margin


def cor2_verdict(
    config: ModelConfig,
    a: float,
    settings: Optional[QuadSettings] = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> DominanceVerdict:
    """
    Necessary and sufficient check for n2 = 2.

    With n1 = 2 as well the condition reduces to a >= 0 and the margin is a
    itself; otherwise the b = n1/2 inequality is evaluated by quadrature.
    """
    if config.n2 != 2:
        raise DomainError(f"the n2 = 2 criterion needs n2 = 2, got n2 = {config.n2}", field="n2")
    config.check_a(a)
    if config.n1 == 2:
        holds, margin, detail = a >= -tolerance, float(a), "n1 = n2 = 2: dominates iff 0 <= a < p/2"
    else:
        holds, margin = thm1_condition(config, a, settings, tolerance)
        detail = "n2 = 2: the b = n1/2 inequality is necessary and sufficient"
    status = VerdictStatus.PROVEN_DOMINATES if holds else VerdictStatus.PROVEN_FAILS_NECESSARY
    return DominanceVerdict(
        holds=status,
        fired_by=Condition.COR2,
        margin=margin,
        tolerance=tolerance,
        detail=detail,
    )


def thm3_applicable(config: ModelConfig, a: float) -> bool:
    """b = 1 dominance: 0 <= a < p/2 and n1 > 2."""
    return 0.0 <= a < config.m and config.n1 > 2


def thm4_applicable(config: ModelConfig, a: float) -> bool:
    """b = 1 dominance in closed form: p >= 2 and a = p/2 - 1."""
    return config.p >= 2 and abs(a - (config.m - 1.0)) <= SPECIAL_CASE_RTOL


def dominance_report(
    prior: PriorSpec,
    config: ModelConfig,
    settings: Optional[QuadSettings] = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> DominanceVerdict:
    """
    Run the applicable checks and return the first decisive verdict.

    b = 1 tries Thm4 then Thm3; b = n1/2 tries Cor2 (n2 = 2), Cor1(i), then
    Thm1. Failure is only ever claimed through the n2 = 2 criterion.
    """
    if prior.is_reference:
        raise DomainError("dominance is checked for hierarchical priors only", field="prior")
    hp = prior.hyper
    hp.validate_for(config)
    a = hp.a
    b = hp.resolve_b(config)

    is_one = math.isclose(b, 1.0, rel_tol=SPECIAL_CASE_RTOL)
    is_half = math.isclose(b, config.k, rel_tol=SPECIAL_CASE_RTOL)

    if is_one and thm4_applicable(config, a):
        return DominanceVerdict(
            holds=VerdictStatus.PROVEN_DOMINATES,
            fired_by=Condition.THM4,
            tolerance=tolerance,
            detail="b = 1, a = p/2 - 1, p >= 2",
        )
    if is_one and thm3_applicable(config, a):
        return DominanceVerdict(
            holds=VerdictStatus.PROVEN_DOMINATES,
            fired_by=Condition.THM3,
            tolerance=tolerance,
            detail="b = 1, 0 <= a < p/2, n1 > 2",
        )

    if is_half:
        if config.n2 == 2:
            return cor2_verdict(config, a, settings, tolerance)
        holds, margin = cor1_i_condition(config, a, tolerance)
        if holds:
            return DominanceVerdict(
                holds=VerdictStatus.PROVEN_DOMINATES,
                fired_by=Condition.COR1I,
                margin=margin,
                tolerance=tolerance,
            )
        holds, margin = thm1_condition(config, a, settings, tolerance)
        if holds:
            return DominanceVerdict(
                holds=VerdictStatus.PROVEN_DOMINATES,
                fired_by=Condition.THM1,
                margin=margin,
                tolerance=tolerance,
            )
        return DominanceVerdict(
            holds=VerdictStatus.INCONCLUSIVE,
            margin=margin,
            tolerance=tolerance,
            detail="checked Cor1i, Thm1; sufficient conditions fail; no necessary condition for n2 != 2",
        )

    if is_one:
        return DominanceVerdict(
            holds=VerdictStatus.INCONCLUSIVE,
            tolerance=tolerance,
            detail="b=1 outside hypotheses (needs n1 > 2 and a >= 0, or a = p/2 - 1)",
        )
    logger.info(f"no dominance result covers b={b} for {config.to_dict()}")
    return DominanceVerdict(
        holds=VerdictStatus.INCONCLUSIVE,
        tolerance=tolerance,
        detail=f"unsupported b = {b}: results exist for b = 1 and b = n1/2 only",
    )
