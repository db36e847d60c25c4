"""
ChiPredict - Tests for tanh-sinh quadrature.
"""

import math

import numpy as np
import pytest
from scipy import special

from chipredict.errors import DomainError, QuadratureError
from chipredict.models.numerics import QuadSettings
from chipredict.services.quadrature import integrate_beta_weighted, node_weights, truncation_point


def ones(g):
    return np.ones_like(g)


class TestIntegrateBetaWeighted:
    """Tests for integrate_beta_weighted."""

    def test_unit_interval(self):
        """Test the integral of 1 over (0, 1)."""
        assert integrate_beta_weighted(ones, 1.0, 1.0) == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("alpha,beta", [(2.5, 3.5), (0.5, 0.5), (0.1, 2.0), (40.0, 1.5), (1.0, 300.0)])
    def test_beta_function(self, alpha, beta):
        """Test that f = 1 reproduces B(alpha, beta), including endpoint singularities."""
        expected = math.exp(special.betaln(alpha, beta))
        assert integrate_beta_weighted(ones, alpha, beta) == pytest.approx(expected, rel=1e-9)

    def test_scalar_integrand(self):
        """Test that a constant returned as a scalar is broadcast."""
        assert integrate_beta_weighted(lambda g: 2.0, 1.0, 1.0) == pytest.approx(2.0, rel=1e-12)

    def test_log_singular_integrand(self):
        """Test int_0^1 ln(g) dg = -1."""
        assert integrate_beta_weighted(np.log, 1.0, 1.0) == pytest.approx(-1.0, rel=1e-10)

    def test_batch_integrand(self):
        """Test a batch of integrands integrated at once."""
        c = np.array([0.0, 0.5, 2.0])
        result = integrate_beta_weighted(lambda g: 1.0 / (1.0 + np.multiply.outer(g, c)), 1.0, 1.0)
        expected = np.array([1.0, math.log(1.5) / 0.5, math.log(3.0) / 2.0])
        assert result.shape == (3,)
        np.testing.assert_allclose(result, expected, rtol=1e-10)

    def test_rejects_nonpositive_exponents(self):
        """Test that alpha, beta <= 0 are domain errors."""
        with pytest.raises(DomainError):
            integrate_beta_weighted(ones, 0.0, 1.0)
        with pytest.raises(DomainError):
            integrate_beta_weighted(ones, 1.0, -2.0)

    def test_refinement_limit(self):
        """Test that too few refinement levels raise QuadratureError."""
        with pytest.raises(QuadratureError) as exc_info:
            integrate_beta_weighted(ones, 2.0, 2.0, QuadSettings(max_refinement_level=2))
        assert exc_info.value.level == 2

    def test_non_finite_integrand(self):
        """Test that NaN values raise QuadratureError."""
        with pytest.raises(QuadratureError):
            integrate_beta_weighted(lambda g: np.full_like(g, np.nan), 1.0, 1.0)


class TestNodes:
    """Tests for the transformed rule."""

    def test_abscissae_in_unit_interval(self):
        """Test that nodes stay inside (0, 1] with nonnegative weights."""
        t = np.linspace(-truncation_point(0.2, 0.2), truncation_point(0.2, 0.2), 401)
        gamma, weight = node_weights(t, 0.2, 0.2)
        assert np.all(gamma > 0) and np.all(gamma <= 1)
        assert np.all(weight >= 0) and np.all(np.isfinite(weight))

    def test_truncation_grows_for_small_exponents(self):
        """Test that small exponents widen the t-interval."""
        assert truncation_point(0.1, 1.0) > truncation_point(1.0, 1.0)
