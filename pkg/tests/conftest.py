"""
ChiPredict - Configuration for pytest.
"""

import pytest
import sys
import os

# Add the package directory to the path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


@pytest.fixture
def config():
    """Create a test configuration."""
    from chipredict.config import Config
    return Config()


@pytest.fixture
def quad_settings():
    """Default quadrature settings."""
    from chipredict.models.numerics import QuadSettings
    return QuadSettings()


@pytest.fixture
def unit_config():
    """n1 = n2 = p = 2, where most quantities have closed forms."""
    from chipredict.models.sampling import ModelConfig
    return ModelConfig(p=2, n1=2, n2=2)


@pytest.fixture
def panel_config():
    """First of the four p = 14 cases."""
    from chipredict.models.sampling import ModelConfig
    return ModelConfig(p=14, n1=3, n2=3)


@pytest.fixture
def panel_cases():
    """All four p = 14 cases."""
    from chipredict.models.sampling import ModelConfig
    return [ModelConfig(p=14, n1=n1, n2=n2) for n1, n2 in ((3, 3), (3, 5), (5, 3), (5, 5))]
