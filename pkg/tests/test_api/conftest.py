"""
Shared fixtures for API endpoint tests.
"""

from collections.abc import Iterator

import pytest
from fastapi.testclient import TestClient

from src.main import app
from tests.fixtures.sample_pools import create_reference_pool


@pytest.fixture
def client() -> Iterator[TestClient]:
    """Test client of the application."""
    with TestClient(app) as test_client:
        yield test_client


@pytest.fixture
def qm_pool_document() -> dict:
    """Power-log reference pool as a request body."""
    return create_reference_pool("qm").model_dump(mode="json")


@pytest.fixture
def am_pool_document() -> dict:
    """Arithmetic reference pool as a request body."""
    return create_reference_pool("am").model_dump(mode="json")
