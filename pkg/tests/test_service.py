"""HTTP service: registration, job lifecycle, and CLI byte parity."""

import threading
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from timberflow.service import create_app

ORACLE_DS = Path(__file__).parent / "data" / "oracle_ds"
GOLDEN = Path(__file__).parent / "data" / "golden_report.json"


@pytest.fixture()
def client() -> TestClient:
    with TestClient(create_app()) as c:
        yield c


@pytest.fixture()
def fingerprint(client) -> str:
    resp = client.post("/datasets", json={"path": str(ORACLE_DS)})
    assert resp.status_code == 201
    return resp.json()["fingerprint"]


def wait_done(client, job_id: str, timeout: float = 15.0) -> dict:
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        status = client.get(f"/scenarios/{job_id}").json()
        if status["state"] in ("done", "failed"):
            return status
        time.sleep(0.02)
    raise AssertionError(f"job {job_id} did not finish")


# -- datasets -------------------------------------------------------------------


def test_register_returns_fingerprint_and_summary(client):
    resp = client.post("/datasets", json={"path": str(ORACLE_DS)})
    assert resp.status_code == 201
    body = resp.json()
    assert len(body["fingerprint"]) == 64
    assert body["summary"]["villages"] == 2
    assert body["already_registered"] is False


def test_registration_is_idempotent_by_content(client):
    first = client.post("/datasets", json={"path": str(ORACLE_DS)}).json()
    second = client.post("/datasets", json={"path": str(ORACLE_DS)}).json()
    assert second["fingerprint"] == first["fingerprint"]
    assert second["already_registered"] is True
    listing = client.get("/datasets").json()
    assert len(listing) == 1
    assert listing[0]["fingerprint"] == first["fingerprint"]


def test_register_surfaces_row_level_validation_errors(client, tmp_path):
    import shutil

    broken = tmp_path / "ds"
    shutil.copytree(ORACLE_DS, broken)
    text = (broken / "transactions.csv").read_text().replace("x4,v2,t2,4", "x4,v9,t2,4")
    (broken / "transactions.csv").write_text(text)
    resp = client.post("/datasets", json={"path": str(broken)})
    assert resp.status_code == 422
    assert "line 5" in resp.json()["detail"]
    assert "v9" in resp.json()["detail"]


def test_register_missing_directory(client):
    resp = client.post("/datasets", json={"path": "/nonexistent"})
    assert resp.status_code == 422


def test_sites_endpoint_serves_planar_coordinates(client, fingerprint):
    resp = client.get(f"/datasets/{fingerprint}/sites")
    assert resp.status_code == 200
    body = resp.json()
    assert body["fingerprint"] == fingerprint
    assert [row[0] for row in body["villages"]] == ["v1", "v2"]
    assert [row[0] for row in body["traders"]] == ["t1", "t2"]
    for _, x, y in body["villages"] + body["traders"]:
        assert isinstance(x, float) and isinstance(y, float)


def test_sites_unknown_fingerprint_404s(client):
    resp = client.get("/datasets/deadbeef/sites")
    assert resp.status_code == 404


def test_cross_origin_browser_clients_are_allowed(client):
    resp = client.get("/health", headers={"Origin": "http://localhost:5173"})
    assert resp.headers["access-control-allow-origin"] == "*"


# -- scenario jobs --------------------------------------------------------------


def test_small_jobs_finish_inside_the_post(client, fingerprint):
    resp = client.post("/scenarios", json={"dataset": fingerprint, "config": {}})
    assert resp.status_code == 201
    body = resp.json()
    assert body["state"] == "done"
    assert body["stages"] == ["od-matrix", "solving", "reporting"]


def test_report_bytes_match_the_cli_golden_file(client, fingerprint):
    job = client.post("/scenarios", json={"dataset": fingerprint, "config": {}}).json()
    resp = client.get(f"/scenarios/{job['id']}/report")
    assert resp.status_code == 200
    assert resp.content == GOLDEN.read_bytes()


def test_unknown_dataset_is_404(client):
    resp = client.post("/scenarios", json={"dataset": "f" * 64, "config": {}})
    assert resp.status_code == 404


def test_config_fields_validated_before_any_work(client, fingerprint):
    resp = client.post(
        "/scenarios", json={"dataset": fingerprint, "config": {"supply_scale": 0}}
    )
    assert resp.status_code == 422
    assert "supply_scale" in resp.json()["detail"]
    resp = client.post(
        "/scenarios", json={"dataset": fingerprint, "config": {"mystery": 1}}
    )
    assert resp.status_code == 422


def test_failed_jobs_keep_the_error_and_block_the_report(client, fingerprint):
    cfg = {"supply_scale": 0.4, "trader_floor": 3}
    job = client.post("/scenarios", json={"dataset": fingerprint, "config": cfg}).json()
    assert job["state"] == "failed"
    assert "floor" in job["error"].lower()
    resp = client.get(f"/scenarios/{job['id']}/report")
    assert resp.status_code == 409


def test_repeat_submissions_reuse_the_cached_result(client, fingerprint):
    first = client.post("/scenarios", json={"dataset": fingerprint, "config": {}}).json()
    second = client.post("/scenarios", json={"dataset": fingerprint, "config": {}}).json()
    assert second["id"] != first["id"]
    assert second["state"] == "done"
    assert second["stages"] == []  # served from cache without recomputing
    a = client.get(f"/scenarios/{first['id']}/report").content
    b = client.get(f"/scenarios/{second['id']}/report").content
    assert a == b


def test_unknown_job_is_404(client):
    assert client.get("/scenarios/j999").status_code == 404
    assert client.get("/scenarios/j999/report").status_code == 404
    assert client.delete("/scenarios/j999").status_code == 404


# -- async execution ------------------------------------------------------------


def test_large_jobs_go_through_the_worker_pool():
    with TestClient(create_app(sync_limit=0, max_workers=1)) as client:
        fp = client.post("/datasets", json={"path": str(ORACLE_DS)}).json()["fingerprint"]
        job = client.post("/scenarios", json={"dataset": fp, "config": {}}).json()
        assert job["state"] in ("queued", "running")
        status = wait_done(client, job["id"])
        assert status["state"] == "done"
        assert status["stages"] == ["od-matrix", "solving", "reporting"]
        assert client.get(f"/scenarios/{job['id']}/report").content == GOLDEN.read_bytes()


def test_queued_jobs_can_be_canceled():
    app = create_app(sync_limit=0, max_workers=1)
    with TestClient(app) as client:
        fp = client.post("/datasets", json={"path": str(ORACLE_DS)}).json()["fingerprint"]
        gate = threading.Event()
        # occupy the only worker so the next submission must sit in the queue
        app.state.registry.executor.submit(gate.wait)
        try:
            job = client.post("/scenarios", json={"dataset": fp, "config": {}}).json()
            assert job["state"] == "queued"
            resp = client.delete(f"/scenarios/{job['id']}")
            assert resp.status_code == 200
            body = resp.json()
            assert body["state"] == "failed"
            assert "canceled" in body["error"]
        finally:
            gate.set()
        # a finished job refuses cancellation
        done = client.post("/scenarios", json={"dataset": fp, "config": {"seed": 1}}).json()
        status = wait_done(client, done["id"])
        assert status["state"] == "done"
        assert client.delete(f"/scenarios/{done['id']}").status_code == 409


def test_disk_cache_persists_across_service_restarts(tmp_path, monkeypatch):
    monkeypatch.setenv("TIMBERFLOW_CACHE", str(tmp_path / "cache"))
    with TestClient(create_app()) as client:
        fp = client.post("/datasets", json={"path": str(ORACLE_DS)}).json()["fingerprint"]
        job = client.post("/scenarios", json={"dataset": fp, "config": {}}).json()
        assert job["state"] == "done"
    assert list((tmp_path / "cache").glob("*.json"))
    with TestClient(create_app()) as client:
        fp = client.post("/datasets", json={"path": str(ORACLE_DS)}).json()["fingerprint"]
        job = client.post("/scenarios", json={"dataset": fp, "config": {}}).json()
        assert job["state"] == "done"
        # no od-matrix or solving stages: the report came straight from disk
        assert "solving" not in job["stages"]
        report = client.get(f"/scenarios/{job['id']}/report").content
        assert report == GOLDEN.read_bytes()


# -- health ---------------------------------------------------------------------


def test_health_counts_jobs_by_state(client, fingerprint):
    client.post("/scenarios", json={"dataset": fingerprint, "config": {}})
    client.post(
        "/scenarios",
        json={"dataset": fingerprint, "config": {"supply_scale": 0.4, "trader_floor": 3}},
    )
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["datasets"] == 1
    assert body["jobs"]["done"] == 1
    assert body["jobs"]["failed"] == 1
