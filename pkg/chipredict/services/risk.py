"""
ChiPredict - Kullback-Leibler risk.
Constant risk of the reference predictive density, semi-analytic risk
differences for the hierarchical prior, and seeded Monte Carlo estimators.
"""

import logging
import math
from dataclasses import dataclass, replace
from multiprocessing import Pool
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import special, stats

from chipredict.errors import DomainError, RiskEvaluationError
from chipredict.models.numerics import QuadSettings
from chipredict.models.priors import PriorSpec
from chipredict.models.results import RiskEstimate
from chipredict.models.sampling import ModelConfig, Observation, SimulationPoint
from chipredict.services.dominance import constants, thm1_integral
from chipredict.services.predictive import SPECIAL_CASE_RTOL, log_predictive
from chipredict.services.quadrature import integrate_beta_weighted
from chipredict.services.sampling import (
    RandomStream,
    log_p2,
    sample_observation_materialized,
    sample_observations,
)
from chipredict.services.specfn import digamma, digamma_diff, log_reg_inc_beta

logger = logging.getLogger(__name__)

DEFAULT_TAIL_MASS = 1e-12

# Series over h for the b = 1, a = p/2 - 1 risk difference.
_SERIES_CHUNK = 1024
_SERIES_MAX_TERMS = 2 ** 20
_SERIES_TOL = 1e-15


def ref_risk_constant(config: ModelConfig) -> float:
    """
    Risk of the reference predictive density, the same for every (mu, eta):

        -ln G(l) - l + ln B(k, l) - k psi(k) + (k+l) psi(k+l).
    """
    k, l = config.k, config.l
    return float(
        -special.gammaln(l)
        - l
        + special.betaln(k, l)
        - k * digamma(k)
        + (k + l) * digamma(k + l)
    )


def poisson_weights(theta: float, tail_mass: float = DEFAULT_TAIL_MASS) -> Tuple[np.ndarray, np.ndarray]:
    """
    Support and probabilities of Z ~ Po(theta/2), truncated so that at most
    tail_mass is lost, and never beyond ceil(mu + 40 sqrt(mu) + 100).
    """
    if not (math.isfinite(theta) and theta >= 0):
        raise DomainError(f"theta must be finite and nonnegative, got {theta}", field="theta")
    if not 0 < tail_mass < 1:
        raise DomainError(f"tail_mass must lie in (0, 1), got {tail_mass}", field="tail_mass")
    mu = theta / 2.0
    if mu == 0:
        return np.zeros(1, dtype=int), np.ones(1)
    cap = int(math.ceil(mu + 40.0 * math.sqrt(mu) + 100.0))
    z_min = int(stats.poisson.ppf(tail_mass / 2.0, mu))
    z_max = min(int(stats.poisson.isf(tail_mass / 2.0, mu)), cap)
    z = np.arange(z_min, z_max + 1)
    logger.debug(f"Poisson({mu}) truncated to z in [{z_min}, {z_max}]")
    return z, stats.poisson.pmf(z, mu)


def riskdiff_terms(
    config: ModelConfig,
    a: float,
    z: Sequence[int],
    settings: Optional[QuadSettings] = None,
) -> np.ndarray:
    """
    D1(z) + D2(z) for b = n1/2, where

        D1(z) = m' [psi(k+l+m+z) - psi(k+m+z)]
        D2(z) = -c2 int_0^1 (1-rho)^(k+l+m+z-1) [1 - (1 + c1 rho)^-(k+l)] / rho d rho.

    The Poisson average of these terms bounds the risk difference from
    above and equals it when n2 = 2.
    """
    consts = constants(config, a)
    k, l, m = config.k, config.l, config.m
    z = np.asarray(z, dtype=float)
    d1 = (m - a) * np.asarray(digamma_diff(k + l + m + z, k + m + z))
    d2 = np.array([-consts.c2 * thm1_integral(config, consts.c1, zi, settings) for zi in z.ravel()])
    return d1 + d2.reshape(z.shape)


def riskdiff_n2eq2(
    config: ModelConfig,
    a: float,
    theta: float,
    settings: Optional[QuadSettings] = None,
    tail_mass: float = DEFAULT_TAIL_MASS,
) -> float:
    """Exact risk difference (hierarchical minus reference) for b = n1/2 and n2 = 2."""
    if config.n2 != 2:
        raise DomainError(f"exact b = n1/2 risk difference needs n2 = 2, got n2 = {config.n2}", field="n2")
    z, pmf = poisson_weights(theta, tail_mass)
    return math.fsum(pmf * riskdiff_terms(config, a, z, settings))


def _expected_neg_log_inc_beta(
    n: float,
    a: float,
    z: float,
    config: ModelConfig,
    settings: QuadSettings,
) -> float:
    # -E[ln I_Q(m', n/2)] for Q ~ Beta(m + z, n/2)
    alpha, beta = config.m + z, n / 2.0
    norm = math.exp(special.betaln(alpha, beta))
    scaled = replace(settings, abs_tol=settings.abs_tol * min(norm, 1.0))
    integral = integrate_beta_weighted(
        lambda q: np.asarray(log_reg_inc_beta(q, config.m - a, beta, settings.small_q_threshold)),
        alpha,
        beta,
        scaled,
    )
    return -integral / norm


def riskdiff_b1(
    config: ModelConfig,
    a: float,
    theta: float,
    settings: Optional[QuadSettings] = None,
    tail_mass: float = DEFAULT_TAIL_MASS,
) -> float:
    """
    Risk difference (hierarchical minus reference) for b = 1:

        E_Z[D(n1+n2; Z) - D(n1; Z)],  D(n; z) = -E[ln I_Q(m', n/2)], Q ~ Beta(m+z, n/2).
    """
    config.check_a(a)
    settings = settings or QuadSettings()
    z, pmf = poisson_weights(theta, tail_mass)
    n_total = config.n1 + config.n2
    diffs = np.array([
        _expected_neg_log_inc_beta(n_total, a, zi, config, settings)
        - _expected_neg_log_inc_beta(config.n1, a, zi, config, settings)
        for zi in z
    ])
    return math.fsum(pmf * diffs)


def _series_log_ratio(s: float, tau: float, h: np.ndarray) -> np.ndarray:
    return (
        special.gammaln(s + tau)
        + special.gammaln((h + 1.0) * tau)
        - special.gammaln(s + (h + 1.0) * tau)
        - special.gammaln(tau)
    )


def _closed_series(s: float, tau_total: float, tau_first: float) -> float:
    """sum_h (1/h) [r_h(tau_total) - r_h(tau_first)] with r_h the moments of (1-Q)^(h tau)."""
    parts: List[float] = []
    h_done = 0
    while h_done < _SERIES_MAX_TERMS:
        h = np.arange(h_done + 1, h_done + _SERIES_CHUNK + 1, dtype=float)
        upper = np.exp(_series_log_ratio(s, tau_total, h)) / h
        lower = np.exp(_series_log_ratio(s, tau_first, h)) / h
        parts.append(math.fsum(upper - lower))
        h_done += _SERIES_CHUNK
        if max(upper.max(), lower.max()) < _SERIES_TOL:
            return math.fsum(parts)

    # r_h(tau) ~ C(tau) (h+1)^-s, so the remainder is a Hurwitz zeta tail.
    def scale(tau: float) -> float:
        return math.exp(special.gammaln(s + tau) - special.gammaln(tau) - s * math.log(tau))

    tail = (scale(tau_total) - scale(tau_first)) * special.zeta(s + 1.0, h_done + 1.0)
    logger.debug(f"closed-form risk series hit {h_done} terms at s={s}; tail {tail:.3g}")
    return math.fsum(parts) + float(tail)


def riskdiff_closed(
    config: ModelConfig,
    theta: float,
    settings: Optional[QuadSettings] = None,
    tail_mass: float = DEFAULT_TAIL_MASS,
) -> float:
    """Risk difference for b = 1 and a = p/2 - 1 from the series expansion of ln[1 - (1-Q)^tau]."""
    if config.p < 2:
        raise DomainError(f"closed form needs p >= 2, got p = {config.p}", field="p")
    z, pmf = poisson_weights(theta, tail_mass)
    tau_total = (config.n1 + config.n2) / 2.0
    values = np.array([_closed_series(config.m + zi, tau_total, config.k) for zi in z])
    return math.fsum(pmf * values)


@dataclass(frozen=True)
class DrawBlock:
    """Replications start..start+len-1 of one (config, theta) cell."""
    start: int
    x_norm_sq: np.ndarray
    v: np.ndarray
    w: np.ndarray


def sample_blocks(
    config: ModelConfig,
    theta: float,
    reps: int,
    seed: int,
    block_size: int = 1000,
) -> List[DrawBlock]:
    """Draws for reps replications in fixed blocks; boundaries depend only on block_size."""
    if reps < 1:
        raise DomainError(f"reps must be >= 1, got {reps}", field="reps")
    if block_size < 1:
        raise DomainError(f"block_size must be >= 1, got {block_size}", field="block_size")
    stream = RandomStream(seed)
    point = SimulationPoint(theta=theta)
    blocks = []
    for start in range(0, reps, block_size):
        stop = min(start + block_size, reps)
        x, v, w = sample_observations(point, config, stream, start, stop)
        blocks.append(DrawBlock(start=start, x_norm_sq=x, v=v, w=w))
    return blocks


def log_predictive_values(
    prior: PriorSpec,
    config: ModelConfig,
    block: DrawBlock,
    settings: Optional[QuadSettings] = None,
) -> np.ndarray:
    """
    log_predictive at every replication of a block.

    The block is evaluated in one batch; if that raises, each replication
    is retried alone and the ones that still fail come back as NaN.
    """
    try:
        obs = Observation(x_norm_sq=block.x_norm_sq, v=block.v)
        return np.asarray(log_predictive(block.w, obs, prior, config, settings), dtype=float)
    except (ArithmeticError, RuntimeError, ValueError) as e:
        logger.warning(f"batch evaluation of replications from {block.start} failed ({e}); retrying one by one")

    values = np.full(block.w.shape, np.nan)
    for i in range(block.w.size):
        try:
            obs = Observation(x_norm_sq=float(block.x_norm_sq[i]), v=float(block.v[i]))
            values[i] = log_predictive(float(block.w[i]), obs, prior, config, settings)
        except (ArithmeticError, RuntimeError, ValueError) as e:
            logger.error(f"replication {block.start + i} failed: {e}")
    return values


def _block_log_predictive(task) -> np.ndarray:
    prior, config, block, settings = task
    return log_predictive_values(prior, config, block, settings)


def evaluate_blocks(
    prior: PriorSpec,
    config: ModelConfig,
    blocks: Sequence[DrawBlock],
    settings: Optional[QuadSettings] = None,
    workers: int = 1,
) -> np.ndarray:
    """log_predictive over all blocks, concatenated in replication order."""
    tasks = [(prior, config, block, settings) for block in blocks]
    if workers > 1 and len(tasks) > 1:
        with Pool(processes=min(workers, len(tasks))) as pool:
            results = pool.map(_block_log_predictive, tasks)
    else:
        results = [_block_log_predictive(task) for task in tasks]
    return np.concatenate(results)


def true_log_density(config: ModelConfig, blocks: Sequence[DrawBlock]) -> np.ndarray:
    return np.concatenate([np.asarray(log_p2(block.w, 1.0, config)) for block in blocks])


def summarize_losses(losses: np.ndarray, reps: int, seed: int) -> RiskEstimate:
    """Mean and standard error of per-replication losses; any NaN is an error."""
    failed = int(np.count_nonzero(~np.isfinite(losses)))
    if failed:
        raise RiskEvaluationError(
            f"{failed} of {reps} replications could not be evaluated",
            failed=failed,
            reps=reps,
        )
    mean = math.fsum(losses) / reps
    if reps < 2:
        logger.warning("a single replication leaves the standard error undefined")
        std_error = float("nan")
    else:
        deviations = losses - mean
        std_error = math.sqrt(math.fsum(deviations * deviations) / (reps - 1) / reps)
    return RiskEstimate(mean=mean, std_error=std_error, reps=reps, seed=seed)


def mc_risk(
    prior: PriorSpec,
    config: ModelConfig,
    theta: float,
    reps: int,
    seed: int,
    *,
    settings: Optional[QuadSettings] = None,
    workers: int = 1,
    block_size: int = 1000,
) -> RiskEstimate:
    """
    Monte Carlo KL risk at eta = 1 and noncentrality theta.

    Replication i draws from RandomStream(seed).split(i) and contributes
    ln p2(W | 1) - ln p2_hat(W; X, V). The estimate is identical for any
    number of workers.

    Raises:
        RiskEvaluationError: if any replication failed; raised after every
            block has been evaluated.
    """
    blocks = sample_blocks(config, theta, reps, seed, block_size)
    predicted = evaluate_blocks(prior, config, blocks, settings, workers)
    return summarize_losses(true_log_density(config, blocks) - predicted, reps, seed)


def mc_risk_difference(
    prior: PriorSpec,
    config: ModelConfig,
    theta: float,
    reps: int,
    seed: int,
    *,
    settings: Optional[QuadSettings] = None,
    workers: int = 1,
    block_size: int = 1000,
) -> RiskEstimate:
    """Paired estimate of risk(prior) - risk(reference) on common draws."""
    blocks = sample_blocks(config, theta, reps, seed, block_size)
    reference = evaluate_blocks(PriorSpec.reference(), config, blocks, settings, workers)
    predicted = evaluate_blocks(prior, config, blocks, settings, workers)
    return summarize_losses(reference - predicted, reps, seed)


def mc_risk_materialized(
    prior: PriorSpec,
    config: ModelConfig,
    mu: Sequence[float],
    eta: float,
    reps: int,
    seed: int,
    settings: Optional[QuadSettings] = None,
) -> RiskEstimate:
    """Monte Carlo KL risk with X ~ N_p(mu, I/eta) drawn explicitly."""
    if reps < 1:
        raise DomainError(f"reps must be >= 1, got {reps}", field="reps")
    stream = RandomStream(seed)
    x_norm_sq = np.empty(reps)
    v = np.empty(reps)
    w = np.empty(reps)
    for i in range(reps):
        obs, w[i] = sample_observation_materialized(mu, eta, config, stream.split(i))
        x_norm_sq[i], v[i] = obs.x_norm_sq, obs.v
    block = DrawBlock(start=0, x_norm_sq=x_norm_sq, v=v, w=w)
    losses = np.asarray(log_p2(w, eta, config)) - log_predictive_values(prior, config, block, settings)
    return summarize_losses(losses, reps, seed)


def semi_analytic_riskdiff(
    prior: PriorSpec,
    config: ModelConfig,
    theta: float,
    settings: Optional[QuadSettings] = None,
    tail_mass: float = DEFAULT_TAIL_MASS,
) -> Optional[float]:
    """
    Risk difference from whichever series/quadrature formula covers the
    prior, or None when none does (reference prior, b outside {1, n1/2},
    or b = n1/2 with n2 != 2).
    """
    if prior.is_reference:
        return None
    hp = prior.hyper
    hp.validate_for(config)
    b = hp.resolve_b(config)
    if math.isclose(b, 1.0, rel_tol=SPECIAL_CASE_RTOL):
        if config.p >= 2 and abs(hp.a - (config.m - 1.0)) <= SPECIAL_CASE_RTOL:
            return riskdiff_closed(config, theta, settings, tail_mass)
        return riskdiff_b1(config, hp.a, theta, settings, tail_mass)
    if math.isclose(b, config.k, rel_tol=SPECIAL_CASE_RTOL) and config.n2 == 2:
        return riskdiff_n2eq2(config, hp.a, theta, settings, tail_mass)
    return None
