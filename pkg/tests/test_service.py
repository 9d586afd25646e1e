import math

import pytest
from fastapi.testclient import TestClient

from ivisim.service.app import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"


def test_cases_endpoint(client):
    body = client.get("/cases").json()
    assert [c["case"] for c in body] == [1, 2, 3]
    case1 = body[0]
    assert case1["a"] == pytest.approx(0.3105)
    assert case1["b"] == -17.25
    case3 = body[2]
    assert case3["a"] - case3["c"] ** 2 / 2 < 0  # Feller violated
    assert body[1]["rho"] == -0.70


def test_reference_endpoint(client):
    resp = client.post("/reference", json={"case": 3, "quantities": ["variance_swap"]})
    assert resp.status_code == 200
    body = resp.json()
    assert body["numeric_failures"] == 0
    assert body["records"][0]["estimate"] == pytest.approx(0.04)


def test_converge_endpoint_runs(client):
    req = {
        "case": 2,
        "schemes": ["ivi", "qe"],
        "quantities": ["variance_swap"],
        "steps": [1, 2],
        "n_paths": 4000,
        "seed": 5,
    }
    body = client.post("/converge", json=req).json()
    assert len(body["records"]) == 4
    assert {r["scheme"] for r in body["records"]} == {"ivi", "qe"}
    again = client.post("/converge", json=req).json()
    assert [r["estimate"] for r in body["records"]] == [r["estimate"] for r in again["records"]]


def test_invalid_config_is_400(client):
    resp = client.post("/converge", json={"case": 9, "schemes": ["ivi"]})
    assert resp.status_code == 400
    resp = client.post("/converge", json={"case": 1, "schemes": ["bogus"]})
    assert resp.status_code == 400
    # neither case nor params -> pydantic-level rejection
    resp = client.post("/converge", json={"schemes": ["ivi"]})
    assert resp.status_code == 422


def test_smile_nan_becomes_null(client):
    req = {"case": 3, "seed": 2, "schemes": ["ivi"], "steps": [2], "n_paths": 4, "strikes": [0.5]}
    body = client.post("/smile", json=req).json()
    rec = body["records"][0]
    assert rec["estimate"] is None
    assert rec["reference"] is not None


def test_samplepaths_endpoint(client):
    req = {"case": 2, "schemes": ["ivi"], "steps": [3], "n_sample_paths": 2, "seed": 1}
    body = client.post("/samplepaths", json=req).json()
    assert len(body["rows"]) == 2 * 4
    assert body["rows"][0]["t"] == 0.0
    assert all(r["v"] >= 0 for r in body["rows"])
