"""
API Tests for the Robust L1 Regression Lab
Run with: pytest tests/test_api.py -v
"""
import math

import pytest
from fastapi.testclient import TestClient

from app.main import app

TINY_X = [[1, 0], [0, 1], [1, 1], [1, -1], [2, 1]]
TINY_Y = [1, 2, 3, -1, 40]


@pytest.fixture(scope="module")
def client():
    """Create test client"""
    with TestClient(app) as c:
        yield c


class TestHealth:
    """Health check endpoint tests"""

    def test_health_check(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        data = response.json()
        assert data["status"] == "healthy"

    def test_root(self, client):
        response = client.get("/")
        assert response.status_code == 200
        assert response.json()["docs"] == "/docs"


class TestAnalytics:
    """Analytics endpoint tests"""

    def test_eta0(self, client):
        response = client.get("/api/v1/analytics/eta0")
        assert response.status_code == 200
        data = response.json()
        assert 0.2385 <= data["eta0"] <= 0.2395
        assert abs(data["eta0"] - data["closed_form"]) <= 1e-8
        assert abs(data["g_minus_b"]) <= 1e-8

    def test_table(self, client):
        response = client.get("/api/v1/analytics/table", params={"start": 0.1, "stop": 0.3, "step": 0.1})
        assert response.status_code == 200
        data = response.json()
        assert data["grid"] == [0.1, 0.2, 0.3]
        for g, b in zip(data["g_values"], data["b_values"]):
            assert g + b == pytest.approx(math.sqrt(2 / math.pi), abs=1e-8)

    def test_table_csv(self, client):
        response = client.get("/api/v1/analytics/table.csv", params={"p": 0.5, "step": 0.5})
        assert response.status_code == 200
        lines = response.text.splitlines()
        assert lines[0] == "gamma,p,g,b"
        assert len(lines) == 4

    def test_breakdown(self, client):
        response = client.get("/api/v1/analytics/breakdown", params={"p": 0.5})
        assert response.status_code == 200
        assert 0.239 < response.json()["threshold"] < 0.5

    def test_breakdown_rejects_p_out_of_range(self, client):
        response = client.get("/api/v1/analytics/breakdown", params={"p": 1.5})
        assert response.status_code == 422


class TestSolve:
    """Solve endpoint tests"""

    def test_l1(self, client):
        response = client.post("/api/v1/solve", json={"X": TINY_X, "y": TINY_Y})
        assert response.status_code == 200
        data = response.json()
        assert data["method"] == "l1"
        assert data["estimate"] == pytest.approx([1.0, 2.0], abs=1e-9)
        assert data["objective"] == pytest.approx(36.0, abs=1e-9)

    def test_constrained_uses_lambda_alias(self, client):
        response = client.post("/api/v1/solve", json={"X": TINY_X, "y": TINY_Y, "method": "l1_constrained", "lambda": 0})
        assert response.status_code == 200
        data = response.json()
        assert data["estimate"] == [0.0, 0.0]
        assert data["termination_reason"] == "closed_form"

    def test_torrent(self, client):
        X = [[float(i)] for i in range(1, 11)]
        y = [float(i) for i in range(1, 10)] + [100.0]
        response = client.post("/api/v1/solve", json={"X": X, "y": y, "method": "torrent", "eta": 0.1})
        assert response.status_code == 200
        data = response.json()
        assert data["estimate"] == pytest.approx([1.0], abs=1e-9)
        assert data["termination_reason"] == "fixed_point"

    def test_missing_parameter_is_422(self, client):
        response = client.post("/api/v1/solve", json={"X": TINY_X, "y": TINY_Y, "method": "lp"})
        assert response.status_code == 422
        assert response.json()["type"] == "DomainError"

    def test_unknown_method_is_400(self, client):
        response = client.post("/api/v1/solve", json={"X": TINY_X, "y": TINY_Y, "method": "ransac"})
        assert response.status_code == 400
        assert response.json()["type"] == "UnknownMethodError"

    def test_dimension_mismatch_is_422(self, client):
        response = client.post("/api/v1/solve", json={"X": TINY_X, "y": [1, 2]})
        assert response.status_code == 422
        assert response.json()["type"] == "DimensionMismatchError"

    def test_rank_deficient_is_400(self, client):
        response = client.post("/api/v1/solve", json={"X": [[1, 1], [1, 1], [1, 1]], "y": [1, 2, 3]})
        assert response.status_code == 400
        assert response.json()["error"] == "numerical_failure"

    def test_malformed_body(self, client):
        response = client.post("/api/v1/solve", json={"y": TINY_Y})
        assert response.status_code == 422


class TestCertificates:
    """Certificate endpoint tests"""

    def test_shelling_bounds(self, client):
        response = client.post("/api/v1/certificates/shelling-bounds",
                               json={"L": 1, "U": 1, "alpha": 2, "k": 4, "delta": 2})
        assert response.status_code == 200
        data = response.json()
        assert data["lower_coefficient"] == pytest.approx(1 / 3)
        assert data["upper_coefficient"] == pytest.approx(1.5)
        assert data["lower_slack"] == pytest.approx(1.0)
        assert data["upper_slack"] == pytest.approx(0.5)

    def test_shelling_bounds_rejects_l_above_u(self, client):
        response = client.post("/api/v1/certificates/shelling-bounds",
                               json={"L": 2, "U": 1, "alpha": 2, "k": 1})
        assert response.status_code == 422

    def test_dkw(self, client):
        response = client.get("/api/v1/certificates/dkw", params={"m": 1000, "tau": 0.05})
        assert response.status_code == 200
        assert response.json()["band"] == pytest.approx(2 * math.exp(-5), rel=1e-12)

    def test_dkw_below_floor(self, client):
        response = client.get("/api/v1/certificates/dkw", params={"m": 1000, "tau": 0.001})
        assert response.status_code == 422

    def test_direction_gap(self, client):
        response = client.post("/api/v1/certificates/direction-gap",
                               json={"X": [[1, 0], [0, 1], [1, 1], [2, 2]], "v": [1, 1], "eta": 0.25})
        assert response.status_code == 200
        assert response.json()["gap"] == pytest.approx(0.0)
