import json
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from evacest.envgraph import Edge, Graph, Room
from evacest.estimator import estimate_environment
from evacest.service import create_app
from evacest.world import SimConfig


class StubModel:
    def predict(self, X):
        return np.full(len(X), 17.0)


@pytest.fixture()
def client(tmp_path):
    app = create_app(model=StubModel(), graphs_dir=str(tmp_path / "graphs"),
                     sim_cfg=SimConfig(rng_seed=1))
    return TestClient(app)


def _chain_doc(n=2, pop=10):
    g = Graph(rooms=[Room(f"r{i}", 8, 8, 2.0, pop if i == 0 else 0)
                     for i in range(n)],
              edges=[Edge(f"r{i}", f"r{i+1}", 1.0) for i in range(n - 1)])
    return g.to_dict()


def test_estimate_single_room(client):
    resp = client.post("/estimate", json=_chain_doc(1))
    assert resp.status_code == 200
    body = resp.json()
    assert body["tt_e"] == 17.0
    assert "r0" in body["per_room"]


def test_estimate_matches_library_field_for_field(client):
    doc = _chain_doc(3, pop=24)
    resp = client.post("/estimate", json=doc)
    assert resp.status_code == 200
    expected = estimate_environment(Graph.from_dict(doc), StubModel()).to_dict()
    got = resp.json()
    got["wall_clock_ms"] = expected["wall_clock_ms"] = 0.0
    assert got == expected


def test_estimate_cyclic_graph_400(client):
    doc = _chain_doc(2)
    doc["edges"].append({"from": "r1", "to": "r0", "fraction": 1.0})
    resp = client.post("/estimate", json=doc)
    assert resp.status_code == 400
    codes = {v["code"] for v in resp.json()["violations"]}
    assert "cycle" in codes


def test_estimate_without_model_422(tmp_path):
    app = create_app(model=None, graphs_dir=str(tmp_path))
    resp = TestClient(app).post("/estimate", json=_chain_doc(1))
    assert resp.status_code == 422


def test_simulate_job_lifecycle(client):
    resp = client.post("/simulate", json={"graph": _chain_doc(1, pop=5)})
    assert resp.status_code == 200
    job_id = resp.json()["id"]
    for _ in range(200):
        r = client.get(f"/jobs/{job_id}")
        assert r.status_code == 200
        if r.json()["status"] in ("done", "failed"):
            break
        time.sleep(0.1)
    body = r.json()
    assert body["status"] == "done"
    assert body["result"]["tt"] > 0
    assert not body["result"]["censored"]
    assert "r0" in body["result"]["room_exit_times"]


def test_unknown_job_404(client):
    assert client.get("/jobs/deadbeef").status_code == 404


def test_graph_put_get_round_trip(client):
    raw = json.dumps(_chain_doc(2), indent=3)  # odd formatting on purpose
    resp = client.put("/graphs/my-plan_1", content=raw)
    assert resp.status_code == 200
    got = client.get("/graphs/my-plan_1")
    assert got.status_code == 200
    assert got.content == raw.encode()  # byte identical


def test_graph_put_invalid_400(client):
    doc = _chain_doc(2)
    doc["rooms"][0]["width"] = -5
    assert client.put("/graphs/bad", content=json.dumps(doc)).status_code == 400


def test_graph_get_missing_404(client):
    assert client.get("/graphs/nothere").status_code == 404


def test_graph_bad_name_400(client):
    assert client.put("/graphs/..%2Fetc", content="{}").status_code in (400, 404)
    assert client.get("/graphs/a b").status_code in (400, 404)
