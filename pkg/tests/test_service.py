import pytest
from fastapi.testclient import TestClient

import sigmaflow
from sigmaflow.service import app


@pytest.fixture()
def client(tmp_path, monkeypatch):
    monkeypatch.setenv("SIGMAFLOW_OUT", str(tmp_path))
    return TestClient(app)


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok"
    assert body["version"] == sigmaflow.__version__


def test_task_listing(client):
    resp = client.get("/tasks")
    assert resp.status_code == 200
    assert "flow" in resp.json()["tasks"]


def test_run_flow_task(client):
    payload = {"config": {"background": {"m_family": "sphere:1"},
                          "flow": {"tau_end": 0.05}},
               "tag": "svc"}
    resp = client.post("/tasks/flow", json=payload)
    assert resp.status_code == 200
    body = resp.json()
    assert body["report"]["passed"] is True
    assert body["report"]["task"] == "flow"
    assert body["run_dir"].endswith("svc")
    checks = body["report"]["checks"]
    assert any(c["check"] == "flow.sphere-closed-form" for c in checks)


def test_unknown_task_is_404(client):
    resp = client.post("/tasks/nope", json={"config": {}})
    assert resp.status_code == 404


def test_invalid_config_is_422(client):
    resp = client.post("/tasks/flow",
                       json={"config": {"flow": {"dt": -1.0}}})
    assert resp.status_code == 422
    resp2 = client.post("/tasks/flow", json={"config": {"bogus": 1}})
    assert resp2.status_code == 422
