"""
ChiPredict - Sampling model.
Component densities, the sufficient reduction, and seeded samplers built on
the Poisson-mixture representation of the noncentral chi-square.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import special

from chipredict.errors import DomainError
from chipredict.models.sampling import ArrayOrFloat, ModelConfig, Observation, SimulationPoint

logger = logging.getLogger(__name__)


class RandomStream:
    """
    Seeded random stream with deterministic substreams.

    A stream is identified by (seed, key). split(i) derives the stream
    (seed, key + (i,)) through numpy's SeedSequence spawn keys, so the draws
    of replication i never depend on which worker produced them or in which
    order replications were visited.
    """

    def __init__(self, seed: int, key: Sequence[int] = ()):
        if isinstance(seed, bool) or int(seed) != seed or seed < 0:
            raise DomainError(f"seed must be a nonnegative integer, got {seed!r}", field="seed")
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        self._generator: Optional[np.random.Generator] = None

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            sequence = np.random.SeedSequence(self.seed, spawn_key=self.key)
            self._generator = np.random.Generator(np.random.PCG64(sequence))
        return self._generator

    def split(self, index: int) -> "RandomStream":
        return RandomStream(self.seed, self.key + (int(index),))

    def chisquare(self, df: ArrayOrFloat, size=None) -> ArrayOrFloat:
        """Chi-square draws for any real df > 0, as 2 * Gamma(df / 2)."""
        return 2.0 * self.generator.standard_gamma(np.asarray(df, dtype=float) / 2.0, size=size)

    def poisson(self, lam: ArrayOrFloat, size=None):
        return self.generator.poisson(lam, size=size)

    def normal(self, size=None) -> np.ndarray:
        return self.generator.standard_normal(size=size)

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, key={self.key})"


def _log_chi2_scaled_density(y: ArrayOrFloat, eta: float, df: float, name: str) -> ArrayOrFloat:
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y)) or np.any(y <= 0):
        raise DomainError(f"{name} must be positive and finite", field=name)
    if not (math.isfinite(eta) and eta > 0):
        raise DomainError(f"eta must be positive, got {eta}", field="eta")
    half = df / 2.0
    value = half * math.log(eta / 2.0) - special.gammaln(half) + (half - 1.0) * np.log(y) - eta * y / 2.0
    return float(value) if value.ndim == 0 else value


def log_p2(w: ArrayOrFloat, eta: float, config: ModelConfig) -> ArrayOrFloat:
    """ln p2(w | eta): eta * W ~ chi^2(n2)."""
    return _log_chi2_scaled_density(w, eta, config.n2, "w")


def log_p1(v: ArrayOrFloat, eta: float, config: ModelConfig) -> ArrayOrFloat:
    """ln p1(v | eta): eta * V ~ chi^2(n1)."""
    return _log_chi2_scaled_density(v, eta, config.n1, "v")


def sufficient_reduce(x: Sequence[float], config: Optional[ModelConfig] = None) -> float:
    """||x||^2 of a length-p vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DomainError(f"x must be a vector, got shape {x.shape}", field="x")
    if config is not None and x.size != config.p:
        raise DomainError(f"x has length {x.size} but p = {config.p}", field="x")
    if not np.all(np.isfinite(x)):
        raise DomainError("x must be finite", field="x")
    return float(np.dot(x, x))


def _draw(point: SimulationPoint, config: ModelConfig, stream: RandomStream) -> Tuple[float, float, float]:
    # draw order is part of the reproducibility contract: Z, T, V, W
    z = stream.poisson(point.theta / 2.0)
    t = stream.chisquare(config.p + 2 * z)
    v = stream.chisquare(config.n1)
    w = stream.chisquare(config.n2)
    return float(t) / point.eta, float(v) / point.eta, float(w) / point.eta


def sample_observation(
    point: SimulationPoint,
    config: ModelConfig,
    stream: RandomStream,
) -> Tuple[Observation, float]:
    """
    Draw (Observation, w) with eta*||X||^2 ~ chi^2(p + 2Z), Z ~ Po(theta/2),
    eta*V ~ chi^2(n1) and eta*W ~ chi^2(n2), all independent.
    """
    x_norm_sq, v, w = _draw(point, config, stream)
    return Observation(x_norm_sq=x_norm_sq, v=v), w


def sample_observations(
    point: SimulationPoint,
    config: ModelConfig,
    stream: RandomStream,
    start: int,
    stop: int,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Replications start..stop-1, replication i drawn from stream.split(i)."""
    if start < 0 or stop < start:
        raise DomainError(f"invalid replication range [{start}, {stop})", field="reps")
    count = stop - start
    x_norm_sq = np.empty(count)
    v = np.empty(count)
    w = np.empty(count)
    for offset, index in enumerate(range(start, stop)):
        x_norm_sq[offset], v[offset], w[offset] = _draw(point, config, stream.split(index))
    return x_norm_sq, v, w


def sample_observation_materialized(
    mu: Sequence[float],
    eta: float,
    config: ModelConfig,
    stream: RandomStream,
) -> Tuple[Observation, float]:
    """Draw X ~ N_p(mu, I/eta) explicitly, then V and W, and reduce X."""
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (config.p,):
        raise DomainError(f"mu must have length p = {config.p}", field="mu")
    if not (math.isfinite(eta) and eta > 0):
        raise DomainError(f"eta must be positive, got {eta}", field="eta")
    x = mu + stream.normal(config.p) / math.sqrt(eta)
    v = float(stream.chisquare(config.n1)) / eta
    w = float(stream.chisquare(config.n2)) / eta
    return Observation(x_norm_sq=sufficient_reduce(x, config), v=v), w
