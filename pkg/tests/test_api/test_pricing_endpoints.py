"""
Tests for the pricing and system endpoints.

Tests POST /pricing/prices, GET /health and GET /.
"""

import pytest

from tests.fixtures.sample_pools import REFERENCE_QM_PRICES


class TestSystemEndpoints:
    """Tests for health and info endpoints."""

    @pytest.mark.api
    @pytest.mark.unit
    def test_health(self, client):
        """Test the health check response."""
        response = client.get("/health")
        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "healthy"
        assert body["version"] == "0.1.0"

    @pytest.mark.api
    @pytest.mark.unit
    def test_root_lists_endpoints(self, client):
        """Test that the root endpoint lists the routers."""
        endpoints = client.get("/").json()["endpoints"]
        assert endpoints["pricing"] == "/pricing"
        assert endpoints["trading"] == "/trading"
        assert endpoints["certification"] == "/certification"


class TestPricesEndpoint:
    """Tests for marginal prices."""

    @pytest.mark.api
    @pytest.mark.unit
    def test_power_log_prices(self, client, qm_pool_document):
        """Test the prices of the reference power-log pool."""
        response = client.post("/pricing/prices", json={"pool": qm_pool_document})
        assert response.status_code == 200
        body = response.json()
        assert body["numeraire"] == 5
        assert body["prices"] == pytest.approx(list(REFERENCE_QM_PRICES), rel=1e-6)
        assert 1.0 < body["trade_function_value"] < 7.0

    @pytest.mark.api
    @pytest.mark.unit
    def test_shorthand_pool(self, client):
        """Test a pool given with scalar fees and a dimensionless trade function."""
        pool = {"reserves": [1.0, 4.0], "fees": 0.9, "trade_function": {"kind": "geometric"}}
        response = client.post("/pricing/prices", json={"pool": pool})
        assert response.status_code == 200
        assert response.json()["prices"] == pytest.approx([4.0, 1.0])

    @pytest.mark.api
    @pytest.mark.validation
    def test_invalid_pool(self, client):
        """Test that an invalid pool is rejected by request validation."""
        pool = {"reserves": [1.0, 0.0], "fees": 0.9, "trade_function": {"kind": "geometric"}}
        response = client.post("/pricing/prices", json={"pool": pool})
        assert response.status_code == 422
