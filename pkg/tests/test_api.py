"""
REST endpoints through the FastAPI test client
"""
from fastapi.testclient import TestClient

from api import app

client = TestClient(app)

S3_SOURCE = """
model s3 {
  basis: 1:0, v:3;
  unit: 1;
}
"""


def test_health():
    response = client.get("/api/health")
    assert response.status_code == 200
    assert response.json()["status"] == "healthy"


def test_presets():
    response = client.get("/api/presets")
    assert response.status_code == 200
    presets = {p["name"]: p["params"] for p in response.json()["presets"]}
    assert presets == {"point": 0, "sphere": 1, "cpn": 1, "product": 2}


def test_hochschild():
    response = client.post("/api/hochschild", json={"model": "sphere:2", "window": "-2..3", "single_thread": True})
    assert response.status_code == 200
    doc = response.json()
    assert {e["degree"]: e["dim"] for e in doc["degrees"]} == {-2: 1, -1: 1, 0: 1, 1: 1, 2: 1, 3: 0}
    assert doc["window"] == "-2..3"


def test_loops_from_source():
    response = client.post("/api/loops", json={"source": S3_SOURCE, "window": "-4..3"})
    assert response.status_code == 200
    doc = response.json()
    assert doc["model"] == "s3"
    assert doc["top_degree"] == 3
    homology = {e["degree"]: e["dim"] for e in doc["homology"]}
    assert homology[0] == 1 and homology[1] == 0


def test_based_ring():
    response = client.post("/api/based", json={"model": "sphere:3", "window": "-6..0", "ring": True})
    assert response.status_code == 200
    ring = response.json()["ring"]
    assert ring["generators"] == {"x": -2}


def test_brane_intersection():
    response = client.post("/api/brane", json={
        "model": "cpn:2",
        "sub": "cpn:1",
        "map": "morphism linear { h -> h }",
        "window": "-8..4",
        "intersection": True,
    })
    assert response.status_code == 200
    intersection = response.json()["intersection"]
    assert intersection["images"]["mu"] == "hx"
    assert intersection["ring_map_failures"] == []


def test_connection():
    response = client.post("/api/connection", json={"model": "cpn:2", "max_len": 4})
    assert response.status_code == 200
    doc = response.json()
    assert doc["eth"] == {"x1": "0", "x2": "-x1.x1"}
    assert [g["degree"] for g in doc["generators"]] == [-1, -3]


def test_verify():
    response = client.post("/api/verify", json={"model": "sphere:3", "window": "-2..3", "oracle": True})
    assert response.status_code == 200
    doc = response.json()
    assert doc["ok"] is True
    assert "oracle" in {c["name"] for c in doc["checks"]}


def test_input_errors_are_400():
    assert client.post("/api/loops", json={"model": "klein:2", "window": "0..1"}).status_code == 400
    assert client.post("/api/loops", json={"model": "sphere:2", "window": "1..0"}).status_code == 400
    assert client.post("/api/loops", json={"window": "0..1"}).status_code == 400
    bad_source = client.post("/api/hochschild", json={"source": "model m { basis: 1:0; }", "window": "0..1"})
    assert bad_source.status_code == 400
    assert "unit required" in bad_source.json()["detail"]


def test_invariant_errors_are_500():
    response = client.post("/api/loops", json={"model": "sphere:2", "window": "-4..2", "reps": {"bad": "1@x"}})
    assert response.status_code == 500
