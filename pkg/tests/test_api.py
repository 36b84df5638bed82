"""
API 테스트 (FastAPI TestClient)
"""

import math

import pytest
from fastapi.testclient import TestClient

from qh_app import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def test_root(client):
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["status"] == "running"


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "healthy"
    assert body["checks"]["domains"] == 6


def test_list_domains(client):
    body = client.get("/api/qh/domains").json()
    assert body["total"] == 6
    names = {d["name"] for d in body["domains"]}
    assert {"half_plane", "punctured_plane", "unit_disk", "square_hole"} <= names


def test_distance_on_vertical(client):
    response = client.post(
        "/api/qh/distance",
        json={"domain": "half_plane", "x": [0, 1], "y": [0, math.e], "tol": 0.01},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["method"] == "segment"
    assert body["upper"] == pytest.approx(1.0, abs=1e-6)
    assert body["path"][0] == [0.0, 1.0]


def test_distance_with_domain_spec(client):
    response = client.post(
        "/api/qh/distance",
        json={"domain": {"kind": "unit_disk", "params": {}}, "x": [0, 0], "y": [0.5, 0]},
    )
    assert response.status_code == 200
    assert response.json()["upper"] == pytest.approx(math.log(2.0), abs=1e-6)


def test_unknown_domain_is_bad_request(client):
    response = client.post("/api/qh/distance", json={"domain": "nowhere", "x": [0, 1], "y": [0, 2]})
    assert response.status_code == 400
    assert "InvalidDomainSpec" in response.json()["detail"]


def test_outside_point_is_unprocessable(client):
    response = client.post("/api/qh/distance", json={"domain": "half_plane", "x": [0, 1], "y": [0, -1]})
    assert response.status_code == 422
    assert "PointOutsideDomain" in response.json()["detail"]


def test_non_positive_tol_rejected(client):
    response = client.post("/api/qh/distance", json={"domain": "half_plane", "x": [0, 1], "y": [0, 2], "tol": 0})
    assert response.status_code == 422


def test_arc(client):
    response = client.post("/api/qh/arc", json={"domain": "half_plane", "x": [0, 1], "y": [0, 3], "h": 0.1})
    body = response.json()
    assert body["h_short"] is True
    assert body["length"] == pytest.approx(math.log(3.0), abs=1e-6)
    assert body["lower"] == pytest.approx(math.log(3.0), abs=1e-6)
    assert body["upper"] == pytest.approx(math.log(3.0), abs=1e-6)
    assert "k_upper" not in body


def test_product(client):
    response = client.post(
        "/api/qh/product",
        json={"domain": "half_plane", "x": [0, 4], "y": [0, 0.25], "w": [0, 1]},
    )
    body = response.json()
    assert body["value"] == pytest.approx(0.0, abs=0.01)
    assert body["within_bounds"] is True


def test_delta(client):
    points = [[0, math.exp(i)] for i in range(4)]
    body = client.post("/api/qh/delta", json={"domain": "half_plane", "points": points}).json()
    assert body["exhaustive"] is True
    assert body["point_count"] == 4
    assert body["delta_hat"] <= body["slack"]
