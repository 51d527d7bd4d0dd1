import json

import pytest
from fastapi.testclient import TestClient

from conftest import farthest
from main import app
from services.braid import shortest_paths
from services.serialization import graph_to_document, path_to_document


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


@pytest.fixture(scope="module")
def a2_document(a2):
    return json.loads(graph_to_document(a2).model_dump_json())


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "healthy"


def test_generate_weyl(client):
    matrix = {"type": "cartan", "n": 2, "entries": [[2, -1], [-3, 2]]}
    response = client.post("/api/v1/graphs/weyl", json=matrix)
    assert response.status_code == 200
    assert len(response.json()["vertices"]) == 12


def test_generate_coxeter_with_radius(client):
    matrix = {"type": "coxeter", "n": 2, "entries": [[1, 0], [0, 1]]}
    response = client.post("/api/v1/graphs/coxeter", params={"radius": 3, "backend": "rational"}, json=matrix)
    assert response.status_code == 200
    doc = response.json()
    assert len(doc["vertices"]) == 7
    assert sum(1 for vertex in doc["vertices"] if vertex["interior"]) == 5


def test_bad_matrix_is_a_400(client):
    matrix = {"type": "coxeter", "n": 2, "entries": [[1, 3], [4, 1]]}
    response = client.post("/api/v1/graphs/coxeter", json=matrix)
    assert response.status_code == 400
    assert response.json()["detail"]["code"] == "BadCoxeterMatrix"


def test_verify(client, a2_document):
    response = client.post("/api/v1/graphs/verify", json=a2_document)
    assert response.status_code == 200
    assert response.json()["passed"] is True

    broken = json.loads(json.dumps(a2_document))
    broken["roots"][0]["coords"] = ["3/1", "1/1"]
    response = client.post("/api/v1/graphs/verify", json=broken)
    assert response.status_code == 200
    assert response.json()["passed"] is False


def test_verify_upload(client, a2_document):
    files = {"file": ("a2.json", json.dumps(a2_document), "application/json")}
    response = client.post("/api/v1/graphs/verify/upload", files=files)
    assert response.status_code == 200
    assert response.json()["passed"] is True

    files = {"file": ("junk.json", "not json", "application/json")}
    response = client.post("/api/v1/graphs/verify/upload", files=files)
    assert response.status_code == 400
    assert response.json()["detail"]["code"] == "ParseError"


def test_distance(client, a2, a2_document):
    body = {"graph": a2_document, "v": a2.base, "w": farthest(a2)}
    response = client.post("/api/v1/graphs/distance", json=body)
    assert response.status_code == 200
    assert response.json() == {"bfs": 3, "geometric": 3, "agree": True}


def test_invalid_graph_is_a_422(client, a2_document):
    broken = json.loads(json.dumps(a2_document))
    broken["roots"][0]["coords"] = ["3/1", "1/1"]
    response = client.post("/api/v1/graphs/distance", json={"graph": broken, "v": 0, "w": 1})
    assert response.status_code == 422
    detail = response.json()["detail"]
    assert detail["code"] == "AxiomViolation"
    assert detail["report"]["passed"] is False


def test_certificates(client, a2, a2_document):
    a, b = shortest_paths(a2, a2.base, farthest(a2))
    body = {
        "graph": a2_document,
        "a": path_to_document(a).model_dump(),
        "b": path_to_document(b).model_dump(),
    }
    response = client.post("/api/v1/certificates", json=body)
    assert response.status_code == 200
    certificate = response.json()
    assert len(certificate["moves"]) == 1

    response = client.post("/api/v1/certificates/verify", json={"graph": a2_document, "certificate": certificate})
    assert response.status_code == 200
    assert response.json()["ok"] is True


def test_certificate_needs_shortest_paths(client, a2, a2_document):
    slot = a2.vertex(a2.base).slots[0]
    detour = {"start": a2.base, "roots": [slot.via, a2.roots.neg(slot.via)]}
    response = client.post("/api/v1/certificates", json={"graph": a2_document, "a": detour, "b": detour})
    assert response.status_code == 400
    assert response.json()["detail"]["code"] == "NotShortestPair"


def test_colorings(client, a2_document):
    response = client.post("/api/v1/colorings", json={"graph": a2_document, "palette": ["x", "y"]})
    assert response.status_code == 200
    doc = response.json()
    assert doc["witness"] is None
    assert set(doc["edges"].values()) == {"x", "y"}
