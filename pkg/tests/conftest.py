"""
Pytest configuration and shared fixtures for all tests.
"""

import pytest

from src.models import LinearUtility, Pool
from tests.fixtures.sample_pools import (
    REFERENCE_GM_PRICES,
    REFERENCE_QM_PRICES,
    create_reference_pool,
)


# Markers for test categorization
def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line("markers", "unit: Unit tests")
    config.addinivalue_line("markers", "integration: Integration tests")
    config.addinivalue_line("markers", "slow: Slow running tests")
    config.addinivalue_line("markers", "models: Model tests")
    config.addinivalue_line("markers", "api: API endpoint tests")
    config.addinivalue_line("markers", "services: Service tests")
    config.addinivalue_line("markers", "validation: Validation tests")
    config.addinivalue_line("markers", "numerics: Numerical accuracy tests")


@pytest.fixture
def qm_pool() -> Pool:
    """Six-asset power-log pool with uniform fee factor 0.9."""
    return create_reference_pool("qm")


@pytest.fixture
def gm_pool() -> Pool:
    """Six-asset geometric mean pool with uniform fee factor 0.9."""
    return create_reference_pool("gm")


@pytest.fixture
def am_pool() -> Pool:
    """Six-asset arithmetic mean pool with uniform fee factor 0.9."""
    return create_reference_pool("am")


@pytest.fixture
def qm_marginal_utility() -> LinearUtility:
    """Utility equal to the marginal prices of the power-log pool."""
    return LinearUtility(prices=REFERENCE_QM_PRICES)


@pytest.fixture
def gm_marginal_utility() -> LinearUtility:
    """Utility equal to the marginal prices of the geometric pool."""
    return LinearUtility(prices=REFERENCE_GM_PRICES)
