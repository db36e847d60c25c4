"""
ChiPredict - Tests for the predictive densities.
"""

import math

import numpy as np
import pytest
from scipy import integrate, special

from chipredict.errors import DomainError
from chipredict.models.priors import BMode, HyperParams, PriorSpec
from chipredict.models.sampling import ModelConfig, Observation
from chipredict.services.predictive import (
    Evaluator,
    hier_log_predictive_b1,
    hier_log_predictive_closed,
    hier_log_predictive_general,
    hier_log_predictive_half,
    log_predictive,
    ref_log_predictive,
    select_evaluator,
)


def total_mass(log_density):
    """Integral of exp(log_density(w)) over w > 0."""
    value, _ = integrate.quad(lambda w: math.exp(log_density(w)), 0.0, np.inf, epsabs=1e-11, epsrel=1e-10, limit=200)
    return value


def random_grid(seed, size=20):
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.1, 10.0, size)
    x = rng.uniform(0.0, 30.0, size)
    v = rng.uniform(0.2, 5.0, size)
    return w, Observation(x_norm_sq=x, v=v)


def random_setting(seed):
    """A random model, observation and admissible (b, a) for normalization checks."""
    rng = np.random.default_rng(1000 + seed)
    config = ModelConfig(p=int(rng.integers(2, 15)), n1=int(rng.integers(2, 7)), n2=int(rng.integers(2, 7)))
    obs = Observation(x_norm_sq=float(rng.uniform(0.0, 30.0)), v=float(rng.uniform(0.2, 5.0)))
    a = float(rng.uniform(-2.0, config.m - 0.2))
    b = float(rng.uniform(0.3, 3.0))
    return config, obs, a, b


def zero_signal_log_density(w, v, a, config):
    k, l, m_prime = config.k, config.l, config.m - a
    return (
        (l - 1.0) * math.log(w)
        + (k + m_prime) * math.log(v)
        - (k + l + m_prime) * math.log(v + w)
        - special.betaln(k + m_prime, l)
    )


class TestReferencePredictive:
    """Tests for the reference-prior predictive density."""

    def test_hand_value(self, unit_config):
        """Test V = w = 1 with n1 = n2 = 2."""
        value = ref_log_predictive(1.0, Observation(x_norm_sq=5.0, v=1.0), unit_config)
        assert value == pytest.approx(math.log(0.25), rel=1e-14)

    def test_independent_of_x(self, panel_config):
        """Test that ||x||^2 does not enter."""
        first = ref_log_predictive(1.7, Observation(x_norm_sq=0.0, v=2.0), panel_config)
        second = ref_log_predictive(1.7, Observation(x_norm_sq=123.0, v=2.0), panel_config)
        assert first == second

    @pytest.mark.parametrize("n1,n2,v", [(3, 3, 2.0), (5, 3, 0.7)])
    def test_normalization(self, n1, n2, v):
        """Test that the density integrates to one."""
        config = ModelConfig(p=14, n1=n1, n2=n2)
        obs = Observation(x_norm_sq=1.0, v=v)
        assert total_mass(lambda w: ref_log_predictive(w, obs, config)) == pytest.approx(1.0, abs=1e-6)

    def test_rejects_nonpositive_w(self, unit_config):
        """Test that w <= 0 is a domain error."""
        with pytest.raises(DomainError) as exc_info:
            ref_log_predictive(0.0, Observation(x_norm_sq=1.0, v=1.0), unit_config)
        assert exc_info.value.field == "w"


class TestClosedForm:
    """Tests for b = 1 and a = p/2 - 1."""

    def test_hand_value(self, unit_config):
        """Test n1 = n2 = p = 2, V = w = 1, ||x||^2 = 2."""
        value = hier_log_predictive_closed(1.0, Observation(x_norm_sq=2.0, v=1.0), unit_config)
        assert value == pytest.approx(math.log(0.28125), rel=1e-13)

    def test_large_signal_approaches_reference(self, panel_config):
        """Test that both brackets tend to one as ||x||^2 grows."""
        obs = Observation(x_norm_sq=1e12, v=2.0)
        assert hier_log_predictive_closed(1.5, obs, panel_config) == pytest.approx(
            ref_log_predictive(1.5, obs, panel_config), abs=1e-6
        )

    def test_small_signal_branch(self, panel_config):
        """Test the first-order branch against the b = 1 evaluator."""
        obs = Observation(x_norm_sq=1e-10, v=2.0)
        assert hier_log_predictive_closed(1.5, obs, panel_config) == pytest.approx(
            hier_log_predictive_b1(1.5, obs, 6.0, panel_config), abs=1e-10
        )

    @pytest.mark.parametrize("v,x", [(1.0, 2.0), (0.7, 4.0), (3.0, 25.0)])
    def test_normalization(self, v, x):
        """Test that the density integrates to one."""
        config = ModelConfig(p=6, n1=3, n2=5)
        obs = Observation(x_norm_sq=x, v=v)
        assert total_mass(lambda w: hier_log_predictive_closed(w, obs, config)) == pytest.approx(1.0, abs=1e-6)

    def test_requires_p_at_least_two(self):
        """Test that p = 1 is rejected."""
        with pytest.raises(DomainError) as exc_info:
            hier_log_predictive_closed(1.0, Observation(x_norm_sq=1.0, v=1.0), ModelConfig(p=1, n1=2, n2=2))
        assert exc_info.value.field == "p"


class TestBOnePredictive:
    """Tests for the b = 1 evaluator."""

    def test_hand_value(self, unit_config):
        """Test the incomplete-beta form at the closed-form point."""
        value = hier_log_predictive_b1(1.0, Observation(x_norm_sq=2.0, v=1.0), 0.0, unit_config)
        assert value == pytest.approx(math.log(0.28125), rel=1e-12)

    def test_agrees_with_closed_form(self):
        """Test a = p/2 - 1 against the closed form on a grid."""
        config = ModelConfig(p=6, n1=3, n2=5)
        w, obs = random_grid(1)
        np.testing.assert_allclose(
            hier_log_predictive_b1(w, obs, 2.0, config),
            hier_log_predictive_closed(w, obs, config),
            rtol=0,
            atol=1e-10,
        )

    def test_large_signal_approaches_reference(self, panel_config):
        """Test that the correction vanishes as ||x||^2 grows."""
        obs = Observation(x_norm_sq=1e12, v=2.0)
        assert hier_log_predictive_b1(1.5, obs, 0.0, panel_config) == pytest.approx(
            ref_log_predictive(1.5, obs, panel_config), abs=1e-6
        )

    def test_zero_signal(self, panel_config):
        """Test ||x||^2 = 0 against the constant-integrand closed form."""
        value = hier_log_predictive_b1(1.5, Observation(x_norm_sq=0.0, v=2.0), 3.0, panel_config)
        assert value == pytest.approx(zero_signal_log_density(1.5, 2.0, 3.0, panel_config), abs=1e-12)

    @pytest.mark.parametrize("x", [0.5e-8, 2e-8])
    def test_small_q_threshold_continuity(self, panel_config, x):
        """Test both sides of the small-q threshold against the general evaluator."""
        obs = Observation(x_norm_sq=x, v=1.0)
        general = hier_log_predictive_general(1.5, obs, HyperParams(a=3.0, b=1.0), panel_config)
        assert hier_log_predictive_b1(1.5, obs, 3.0, panel_config) == pytest.approx(general, abs=1e-8)

    def test_correction_ratio_is_positive_and_finite(self, panel_config):
        """Test that the factor multiplying the reference density lies in (0, inf)."""
        w, obs = random_grid(2)
        diff = hier_log_predictive_b1(w, obs, 0.0, panel_config) - ref_log_predictive(w, obs, panel_config)
        assert np.all(np.isfinite(diff))

    def test_normalization(self, panel_config):
        """Test that the density integrates to one."""
        obs = Observation(x_norm_sq=20.0, v=2.0)
        assert total_mass(lambda w: hier_log_predictive_b1(w, obs, 0.0, panel_config)) == pytest.approx(
            1.0, abs=1e-6
        )


class TestGeneralPredictive:
    """Tests for the general and b = n1/2 evaluators."""

    def test_zero_signal(self, panel_config):
        """Test ||x||^2 = 0, where both integrals collapse to beta functions."""
        value = hier_log_predictive_general(0.8, Observation(x_norm_sq=0.0, v=1.3), HyperParams(a=2.0, b=0.7), panel_config)
        assert value == pytest.approx(zero_signal_log_density(0.8, 1.3, 2.0, panel_config), abs=1e-10)

    def test_half_zero_signal(self, panel_config):
        """Test the b = n1/2 evaluator at ||x||^2 = 0."""
        value = hier_log_predictive_half(0.8, Observation(x_norm_sq=0.0, v=1.3), 2.0, panel_config)
        assert value == pytest.approx(zero_signal_log_density(0.8, 1.3, 2.0, panel_config), abs=1e-9)

    def test_agrees_with_b1(self, panel_config):
        """Test b = 1 against the incomplete-beta form on a grid."""
        w, obs = random_grid(3, size=100)
        np.testing.assert_allclose(
            hier_log_predictive_general(w, obs, HyperParams(a=1.0, b=1.0), panel_config),
            hier_log_predictive_b1(w, obs, 1.0, panel_config),
            rtol=0,
            atol=1e-8,
        )

    @pytest.mark.parametrize("n1,n2,a", [(3, 3, 0.0), (5, 3, 6.0), (3, 5, -1.0)])
    def test_agrees_with_half(self, n1, n2, a):
        """Test b = n1/2 against the hypergeometric-integral form on a grid."""
        config = ModelConfig(p=14, n1=n1, n2=n2)
        w, obs = random_grid(4, size=100)
        np.testing.assert_allclose(
            hier_log_predictive_general(w, obs, HyperParams(a=a, b=config.k), config),
            hier_log_predictive_half(w, obs, a, config),
            rtol=0,
            atol=1e-8,
        )

    @pytest.mark.parametrize("x,v", [(100.0, 1.0), (1e3, 1.0), (1e3, 1e-3), (1e4, 1e-2), (1e10, 1e-2)])
    def test_agrees_with_specialized_forms_at_large_signal(self, panel_config, x, v):
        """Test b = 1 and b = n1/2 against the general evaluator for ||x||^2/V from 1e2 to 1e12."""
        obs = Observation(x_norm_sq=x, v=v)
        w = np.array([0.05, 1.5, 40.0])
        for a in (0.0, 3.0, 6.5):
            np.testing.assert_allclose(
                hier_log_predictive_general(w, obs, HyperParams(a=a, b=1.0), panel_config),
                hier_log_predictive_b1(w, obs, a, panel_config),
                rtol=0,
                atol=1e-8,
            )
            np.testing.assert_allclose(
                hier_log_predictive_general(w, obs, HyperParams(a=a, b=panel_config.k), panel_config),
                hier_log_predictive_half(w, obs, a, panel_config),
                rtol=0,
                atol=1e-8,
            )

    def test_normalization(self):
        """Test that the general density integrates to one."""
        config = ModelConfig(p=2, n1=3, n2=3)
        obs = Observation(x_norm_sq=2.2, v=1.3)
        hp = HyperParams(a=0.3, b=0.7)
        assert total_mass(lambda w: hier_log_predictive_general(w, obs, hp, config)) == pytest.approx(1.0, abs=1e-6)

    def test_half_normalization(self):
        """Test that the b = n1/2 density integrates to one."""
        config = ModelConfig(p=4, n1=3, n2=5)
        obs = Observation(x_norm_sq=6.0, v=0.9)
        assert total_mass(lambda w: hier_log_predictive_half(w, obs, 0.5, config)) == pytest.approx(1.0, abs=1e-6)

    def test_rejects_a_at_half_p(self, unit_config):
        """Test that a >= p/2 is a domain error."""
        with pytest.raises(DomainError) as exc_info:
            hier_log_predictive_general(1.0, Observation(x_norm_sq=1.0, v=1.0), HyperParams(a=1.0, b=1.0), unit_config)
        assert exc_info.value.field == "a"


class TestNormalization:
    """Test that every evaluator integrates to one over random settings."""

    @pytest.mark.parametrize("seed", range(20))
    def test_general(self, seed):
        """Test the general evaluator."""
        config, obs, a, b = random_setting(seed)
        hp = HyperParams(a=a, b=b)
        assert total_mass(lambda w: hier_log_predictive_general(w, obs, hp, config)) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("seed", range(20))
    def test_half(self, seed):
        """Test the b = n1/2 evaluator."""
        config, obs, a, _ = random_setting(seed)
        assert total_mass(lambda w: hier_log_predictive_half(w, obs, a, config)) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("seed", range(20))
    def test_b1(self, seed):
        """Test the b = 1 evaluator."""
        config, obs, a, _ = random_setting(seed)
        assert total_mass(lambda w: hier_log_predictive_b1(w, obs, a, config)) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("seed", range(20))
    def test_closed(self, seed):
        """Test the closed form."""
        config, obs, _, _ = random_setting(seed)
        assert total_mass(lambda w: hier_log_predictive_closed(w, obs, config)) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("seed", range(20))
    def test_reference(self, seed):
        """Test the reference density."""
        config, obs, _, _ = random_setting(seed)
        assert total_mass(lambda w: ref_log_predictive(w, obs, config)) == pytest.approx(1.0, abs=1e-6)


class TestScaleEquivariance:
    """Test that rescaling (V, ||x||^2, w) by lambda shifts every log density by -ln lambda."""

    @pytest.mark.parametrize(
        "prior",
        [
            PriorSpec.reference(),
            PriorSpec.hierarchical(a=6.0, b_mode=BMode.ONE),
            PriorSpec.hierarchical(a=0.0, b_mode=BMode.ONE),
            PriorSpec.hierarchical(a=0.0, b_mode=BMode.HALF),
            PriorSpec.hierarchical(a=1.0, b=0.7),
        ],
    )
    def test_equivariance(self, panel_config, prior):
        """Test lambda = 3.5 at one point for each evaluator."""
        lam = 3.5
        base = log_predictive(1.2, Observation(x_norm_sq=9.0, v=2.5), prior, panel_config)
        scaled = log_predictive(lam * 1.2, Observation(x_norm_sq=lam * 9.0, v=lam * 2.5), prior, panel_config)
        assert scaled == pytest.approx(base - math.log(lam), abs=1e-9)


class TestDispatch:
    """Tests for select_evaluator and log_predictive."""

    @pytest.mark.parametrize(
        "prior,config,expected",
        [
            (PriorSpec.reference(), ModelConfig(p=14, n1=3, n2=3), Evaluator.REFERENCE),
            (PriorSpec.hierarchical(a=0.0, b_mode=BMode.ONE), ModelConfig(p=2, n1=2, n2=2), Evaluator.CLOSED),
            (PriorSpec.hierarchical(a=6.0, b_mode=BMode.ONE), ModelConfig(p=14, n1=3, n2=3), Evaluator.CLOSED),
            (PriorSpec.hierarchical(a=0.0, b_mode=BMode.ONE), ModelConfig(p=14, n1=3, n2=3), Evaluator.B_ONE),
            (PriorSpec.hierarchical(a=0.0, b=1.0), ModelConfig(p=14, n1=3, n2=3), Evaluator.B_ONE),
            (PriorSpec.hierarchical(a=0.0, b_mode=BMode.ONE), ModelConfig(p=1, n1=3, n2=3), Evaluator.B_ONE),
            (PriorSpec.hierarchical(a=6.0, b_mode=BMode.HALF), ModelConfig(p=14, n1=3, n2=3), Evaluator.HALF),
            (PriorSpec.hierarchical(a=0.0, b=1.5), ModelConfig(p=14, n1=3, n2=3), Evaluator.HALF),
            (PriorSpec.hierarchical(a=0.3, b=0.7), ModelConfig(p=2, n1=3, n2=3), Evaluator.GENERAL),
        ],
    )
    def test_select_evaluator(self, prior, config, expected):
        """Test that the most specialized evaluator is chosen."""
        assert select_evaluator(prior, config) is expected

    def test_reference_dispatch(self, panel_config):
        """Test that the reference prior returns ref_log_predictive."""
        obs = Observation(x_norm_sq=3.0, v=2.0)
        assert log_predictive(1.0, obs, PriorSpec.reference(), panel_config) == ref_log_predictive(1.0, obs, panel_config)

    def test_closed_dispatch(self, unit_config):
        """Test that (b, a) = (1, p/2 - 1) reaches the closed form."""
        value = log_predictive(1.0, Observation(x_norm_sq=2.0, v=1.0), PriorSpec.hierarchical(a=0.0, b=1.0), unit_config)
        assert value == pytest.approx(math.log(0.28125), rel=1e-13)

    def test_dispatch_agrees_with_general(self, panel_config):
        """Test every specialized path against the general evaluator."""
        w, obs = random_grid(5, size=10)
        for a, b in ((6.0, 1.0), (0.0, 1.0), (2.0, panel_config.k)):
            specialized = log_predictive(w, obs, PriorSpec.hierarchical(a=a, b=b), panel_config)
            general = hier_log_predictive_general(w, obs, HyperParams(a=a, b=b), panel_config)
            np.testing.assert_allclose(specialized, general, rtol=0, atol=1e-8)

    def test_batch_matches_scalar(self, panel_config):
        """Test that batch evaluation agrees with pointwise evaluation."""
        w, obs = random_grid(6, size=5)
        prior = PriorSpec.hierarchical(a=1.0, b=0.7)
        batch = log_predictive(w, obs, prior, panel_config)
        for i in range(5):
            single = log_predictive(w[i], Observation(x_norm_sq=obs.x_norm_sq[i], v=obs.v[i]), prior, panel_config)
            assert batch[i] == pytest.approx(single, rel=1e-9)

    def test_general_normalization_via_dispatch(self):
        """Test (b, a) = (0.7, 0.3) at p = 2 through the dispatcher."""
        config = ModelConfig(p=2, n1=2, n2=2)
        obs = Observation(x_norm_sq=1.5, v=0.8)
        prior = PriorSpec.hierarchical(a=0.3, b=0.7)
        assert select_evaluator(prior, config) is Evaluator.GENERAL
        assert total_mass(lambda w: log_predictive(w, obs, prior, config)) == pytest.approx(1.0, abs=1e-6)
