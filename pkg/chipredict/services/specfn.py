"""
ChiPredict - Special functions.
Log-gamma, digamma, regularized incomplete beta and its inverse, and the
Gauss hypergeometric function at nonpositive argument.
"""

import logging
import math
from typing import Optional, Tuple, Union

import numpy as np
from scipy import special

from chipredict.errors import ConvergenceError, DomainError
from chipredict.models.numerics import QuadSettings
from chipredict.services.quadrature import integrate_beta_weighted

logger = logging.getLogger(__name__)

ArrayOrFloat = Union[float, np.ndarray]

# Asymptotic expansion of digamma is used from here upwards.
DIGAMMA_ASYMPTOTIC_FROM = 6.0

# B_2k / (2k) for k = 1..7
_DIGAMMA_SERIES = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

# Terms of the digamma-difference series summed explicitly before the analytic tail.
DIGAMMA_DIFF_TERMS = 64

_INVERSE_BISECTIONS = 64
_LOGIT_LOW = -745.0
_INVERSE_NEWTON_STEPS = 8
_INVERSE_TOL = 1e-12


def _output(value: np.ndarray) -> ArrayOrFloat:
    return float(value) if np.ndim(value) == 0 else value


def _positive(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"{name} must be positive and finite, got {x}", field=name)
    return arr


def log_gamma(x: ArrayOrFloat) -> ArrayOrFloat:
    """ln Gamma(x) for x > 0."""
    return _output(special.gammaln(_positive(x, "x")))


def log_beta(alpha: ArrayOrFloat, beta: ArrayOrFloat) -> ArrayOrFloat:
    """ln B(alpha, beta)."""
    return _output(special.betaln(_positive(alpha, "alpha"), _positive(beta, "beta")))


def _digamma_asymptotic(x: np.ndarray) -> np.ndarray:
    inv = 1.0 / x
    inv2 = inv * inv
    tail = np.zeros_like(x)
    for coefficient in reversed(_DIGAMMA_SERIES):
        tail = (tail + coefficient) * inv2
    return np.log(x) - 0.5 * inv - tail


def digamma(x: ArrayOrFloat) -> ArrayOrFloat:
    """
    psi(x) for x > 0.

    Arguments below 6 are shifted upwards, evaluated by the asymptotic
    expansion and brought back down with psi(x) = psi(x + 1) - 1/x.
    """
    x = _positive(x, "x")
    shift = np.maximum(0, np.ceil(DIGAMMA_ASYMPTOTIC_FROM - x)).astype(int)
    value = _digamma_asymptotic(x + shift)
    for step in range(int(shift.max(initial=0))):
        active = shift > step
        value = value - np.where(active, 1.0 / (x + step), 0.0)
    return _output(value)


def digamma_diff(xi1: ArrayOrFloat, xi2: ArrayOrFloat) -> ArrayOrFloat:
    """
    psi(xi1) - psi(xi2) as sum_i (xi1 - xi2) / ((i + xi1)(i + xi2)).

    The first DIGAMMA_DIFF_TERMS terms are summed directly and the remainder
    psi(N + xi1) - psi(N + xi2) is taken from the asymptotic expansion.
    """
    xi1 = _positive(xi1, "xi1")
    xi2 = _positive(xi2, "xi2")
    xi1, xi2 = np.broadcast_arrays(xi1, xi2)
    i = np.arange(DIGAMMA_DIFF_TERMS, dtype=float).reshape((-1,) + (1,) * xi1.ndim)
    head = np.sum((xi1 - xi2) / ((i + xi1) * (i + xi2)), axis=0)
    tail = _digamma_asymptotic(DIGAMMA_DIFF_TERMS + xi1) - _digamma_asymptotic(DIGAMMA_DIFF_TERMS + xi2)
    return _output(head + tail)


def chi2_log_expectation(nu: ArrayOrFloat) -> ArrayOrFloat:
    """E[ln T] for T ~ chi^2(nu): ln 2 + psi(nu / 2)."""
    return _output(math.log(2.0) + np.asarray(digamma(np.asarray(nu, dtype=float) / 2.0)))


def _check_unit(q, name: str = "q", open_interval: bool = False) -> np.ndarray:
    arr = np.asarray(q, dtype=float)
    if open_interval:
        bad = ~np.isfinite(arr) | (arr <= 0) | (arr >= 1)
    else:
        bad = ~np.isfinite(arr) | (arr < 0) | (arr > 1)
    if np.any(bad):
        interval = "(0, 1)" if open_interval else "[0, 1]"
        raise DomainError(f"{name} must lie in {interval}, got {q}", field=name)
    return arr


def reg_inc_beta(q: ArrayOrFloat, alpha: float, beta: float) -> ArrayOrFloat:
    """Regularized incomplete beta I_q(alpha, beta)."""
    q = _check_unit(q)
    return _output(special.betainc(_positive(alpha, "alpha"), _positive(beta, "beta"), q))


def log_reg_inc_beta(
    q: ArrayOrFloat,
    alpha: float,
    beta: float,
    small_q_threshold: float = 1e-8,
) -> ArrayOrFloat:
    """
    ln I_q(alpha, beta), accurate where I_q underflows or sits next to 1.

    Below small_q_threshold the series
    I_q = q^a (1-q)^b / (a B(a, b)) * 2F1(a+b, 1; a+1; q)
    is cut after its linear term; the same representation with the full
    hypergeometric factor covers moderate q whose I_q underflows.
    """
    alpha = float(_positive(alpha, "alpha"))
    beta = float(_positive(beta, "beta"))
    q = _check_unit(q)
    out = np.empty_like(q)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lead = (
            alpha * np.log(q)
            + beta * np.log1p(-q)
            - math.log(alpha)
            - special.betaln(alpha, beta)
        )
        small = q < small_q_threshold
        out[small] = lead[small] + np.log1p((alpha + beta) / (alpha + 1.0) * q[small])

        rest = ~small
        direct = special.betainc(alpha, beta, q[rest])
        upper = special.betainc(beta, alpha, 1.0 - q[rest])
        value = np.where(
            direct > 0.5,
            np.log1p(-upper),
            np.log(np.where(direct > 0, direct, 1.0)),
        )
        underflow = direct < 1e-280
        if np.any(underflow):
            qu = q[rest][underflow]
            value[underflow] = lead[rest][underflow] + np.log(special.hyp2f1(alpha + beta, 1.0, alpha + 1.0, qu))
        out[rest] = value

    out[q == 0] = -np.inf
    out[q == 1] = 0.0
    return _output(out)


def _lower_quantile(omega: np.ndarray, alpha: float, beta: float) -> Tuple[np.ndarray, np.ndarray]:
    """Root of I_q(alpha, beta) = omega with q <= 1/2, and its residual."""
    lo = np.full_like(omega, _LOGIT_LOW)
    hi = np.zeros_like(omega)
    for _ in range(_INVERSE_BISECTIONS):
        mid = 0.5 * (lo + hi)
        below = special.betainc(alpha, beta, special.expit(mid)) < omega
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)

    q = special.expit(0.5 * (lo + hi))
    lo = special.expit(lo)
    hi = special.expit(hi)
    log_norm = special.betaln(alpha, beta)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        for _ in range(_INVERSE_NEWTON_STEPS):
            residual = special.betainc(alpha, beta, q) - omega
            density = np.exp((alpha - 1.0) * np.log(q) + (beta - 1.0) * np.log1p(-q) - log_norm)
            step = np.where(density > 0, residual / density, 0.0)
            candidate = q - step
            inside = np.isfinite(candidate) & (candidate > lo) & (candidate < hi)
            q = np.where(inside, candidate, q)
        density = np.exp((alpha - 1.0) * np.log(q) + (beta - 1.0) * np.log1p(-q) - log_norm)
        # Nothing finer than one ulp of q is attainable.
        granularity = np.where(np.isfinite(density), 4.0 * density * np.spacing(q), 0.0)
    residual = np.abs(special.betainc(alpha, beta, q) - omega)
    return q, np.maximum(residual - granularity, 0.0)


def inv_reg_inc_beta(omega: ArrayOrFloat, alpha: float, beta: float) -> ArrayOrFloat:
    """
    Quantile q with I_q(alpha, beta) = omega.

    Quantiles above 1/2 are found as 1 - r with I_r(beta, alpha) = 1 - omega,
    so both tails keep full relative precision. Each side is a vectorized
    bisection on logit(q) polished by Newton steps on the beta density.

    Raises:
        ConvergenceError: if the residual in omega-space stays above 1e-12.
    """
    alpha = float(_positive(alpha, "alpha"))
    beta = float(_positive(beta, "beta"))
    omega = _check_unit(omega, "omega", open_interval=True)

    shape = omega.shape
    omega = np.atleast_1d(omega)
    upper = omega > special.betainc(alpha, beta, 0.5)
    q = np.empty_like(omega)
    residual = np.zeros_like(omega)
    if np.any(~upper):
        q[~upper], residual[~upper] = _lower_quantile(omega[~upper], alpha, beta)
    if np.any(upper):
        r, residual[upper] = _lower_quantile(1.0 - omega[upper], beta, alpha)
        q[upper] = 1.0 - r

    worst = float(np.max(residual, initial=0.0))
    if worst > _INVERSE_TOL:
        raise ConvergenceError(
            f"inverse incomplete beta did not converge (alpha={alpha}, beta={beta}, residual {worst:.3g})",
            iterations=_INVERSE_BISECTIONS + _INVERSE_NEWTON_STEPS,
            residual=worst,
        )
    return _output(q.reshape(shape))


def gauss_2f1_negz(
    a: float,
    b: float,
    c: float,
    z: float,
    settings: Optional[QuadSettings] = None,
) -> float:
    """
    F(a, b; c; z) for z <= 0 from the Euler integral

        F = 1/B(b, c-b) * int_0^1 t^(b-1) (1-t)^(c-b-1) (1 - z t)^(-a) dt.
    """
    if not (math.isfinite(a) and a > 0):
        raise DomainError(f"a must be positive, got {a}", field="a")
    if not (math.isfinite(b) and b > 0):
        raise DomainError(f"b must be positive, got {b}", field="b")
    if not (math.isfinite(c) and c > b):
        raise DomainError(f"c must exceed b = {b}, got {c}", field="c")
    if not (math.isfinite(z) and z <= 0):
        raise DomainError(f"z must be nonpositive, got {z}", field="z")
    if z == 0:
        return 1.0

    integral = integrate_beta_weighted(
        lambda t: np.exp(-a * np.log1p(-z * t)),
        b,
        c - b,
        settings,
    )
    return integral / math.exp(special.betaln(b, c - b))
