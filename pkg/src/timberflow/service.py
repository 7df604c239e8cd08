"""HTTP facade over dataset registration and scenario runs.

Datasets register by filesystem path and are addressed by content
fingerprint, so re-registering the same bytes is a no-op.  Scenario runs
are jobs: small datasets run synchronously inside the POST, larger ones go
through a bounded worker pool and are polled by id.  A finished job's
report is the same canonical document the command line emits, byte for
byte, and completed runs are reused via the (fingerprint, config) cache.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import cache
from .dataset import Dataset, DatasetError, load_dataset
from .report import render_report
from .roads import RoadFileError
from .scenario import ScenarioConfig, run_scenario

#: village x trader counts up to this size solve inside the request
DEFAULT_SYNC_LIMIT = 2500

QUEUED, RUNNING, DONE, FAILED = "queued", "running", "done", "failed"


class RegisterRequest(BaseModel):
    path: str


class ScenarioRequest(BaseModel):
    dataset: str  # fingerprint from registration
    config: dict[str, Any] = {}


@dataclass
class Job:
    id: str
    fingerprint: str
    config: ScenarioConfig
    state: str = QUEUED
    stage: str | None = None
    stages: list[str] = field(default_factory=list)
    error: str | None = None
    report_text: str | None = None
    future: Any = None

    def status(self) -> dict:
        return {
            "id": self.id,
            "dataset": self.fingerprint,
            "state": self.state,
            "stage": self.stage,
            "stages": list(self.stages),
            "error": self.error,
            "config": self.config.to_dict(),
        }


class _Registry:
    """All mutable service state, guarded by one lock."""

    def __init__(self, max_workers: int, sync_limit: int) -> None:
        from concurrent.futures import ThreadPoolExecutor

        self.lock = threading.Lock()
        self.datasets: dict[str, Dataset] = {}
        self.jobs: dict[str, Job] = {}
        self.memory_cache: dict[str, str] = {}
        self.sync_limit = sync_limit
        self.executor = ThreadPoolExecutor(max_workers=max_workers)
        self._serial = 0

    def next_job_id(self) -> str:
        self._serial += 1
        return f"j{self._serial}"

    def lookup_report(self, key: str) -> str | None:
        return self.memory_cache.get(key)

    def execute(self, job: Job, ds: Dataset) -> None:
        key = cache.cache_key(job.fingerprint, job.config)
        try:
            with self.lock:
                job.state = RUNNING
            text = cache.cached_report(job.fingerprint, job.config)
            if text is None:

                def progress(stage: str) -> None:
                    with self.lock:
                        job.stage = stage
                        job.stages.append(stage)

                result = run_scenario(ds, job.config, progress=progress)
                text = render_report(result, job.fingerprint)
                cache.store_report(job.fingerprint, job.config, text)
            with self.lock:
                self.memory_cache[key] = text
                job.report_text = text
                job.state = DONE
                job.stage = None
        except Exception as exc:
            with self.lock:
                job.state = FAILED
                job.error = str(exc)
                job.stage = None


def create_app(
    max_workers: int = 2,
    sync_limit: int = DEFAULT_SYNC_LIMIT,
) -> FastAPI:
    app = FastAPI(title="timberflow", version="1")
    # browser clients ship separately and hit the service cross-origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    reg = _Registry(max_workers, sync_limit)
    app.state.registry = reg

    @app.post("/datasets", status_code=201)
    def register_dataset(body: RegisterRequest) -> dict:
        try:
            ds = load_dataset(Path(body.path))
        except (DatasetError, RoadFileError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        with reg.lock:
            known = ds.fingerprint in reg.datasets
            reg.datasets[ds.fingerprint] = ds
        return {
            "fingerprint": ds.fingerprint,
            "already_registered": known,
            "summary": ds.summary(),
        }

    @app.get("/datasets")
    def list_datasets() -> list[dict]:
        with reg.lock:
            items = list(reg.datasets.values())
        return [
            {"fingerprint": ds.fingerprint, "path": str(ds.path), "summary": ds.summary()}
            for ds in items
        ]

    @app.get("/datasets/{fingerprint}/sites")
    def dataset_sites(fingerprint: str) -> dict:
        # planar coordinates for map views; clients never read dataset files
        with reg.lock:
            ds = reg.datasets.get(fingerprint)
        if ds is None:
            raise HTTPException(status_code=404, detail=f"unknown dataset {fingerprint!r}")
        return {
            "fingerprint": ds.fingerprint,
            "villages": [[v.id, v.x, v.y] for v in ds.villages],
            "traders": [[t.id, t.x, t.y] for t in ds.traders],
        }

    @app.post("/scenarios", status_code=201)
    def submit_scenario(body: ScenarioRequest) -> dict:
        try:
            cfg = ScenarioConfig.from_dict(body.config)
        except (ValueError, TypeError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        with reg.lock:
            ds = reg.datasets.get(body.dataset)
            if ds is None:
                raise HTTPException(status_code=404, detail=f"unknown dataset {body.dataset!r}")
            job = Job(reg.next_job_id(), ds.fingerprint, cfg)
            reg.jobs[job.id] = job
            key = cache.cache_key(job.fingerprint, cfg)
            cached = reg.lookup_report(key)
            if cached is not None:
                job.state = DONE
                job.report_text = cached
                return job.status()
        small = len(ds.villages) * len(ds.traders) <= reg.sync_limit
        if small:
            reg.execute(job, ds)
        else:
            with reg.lock:
                job.future = reg.executor.submit(reg.execute, job, ds)
        with reg.lock:
            return job.status()

    def _get_job(job_id: str) -> Job:
        with reg.lock:
            job = reg.jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown scenario {job_id!r}")
        return job

    @app.get("/scenarios/{job_id}")
    def scenario_status(job_id: str) -> dict:
        job = _get_job(job_id)
        with reg.lock:
            return job.status()

    @app.get("/scenarios/{job_id}/report")
    def scenario_report(job_id: str) -> Response:
        job = _get_job(job_id)
        with reg.lock:
            state, text, error = job.state, job.report_text, job.error
        if state == FAILED:
            raise HTTPException(status_code=409, detail=f"scenario failed: {error}")
        if state != DONE or text is None:
            raise HTTPException(status_code=409, detail=f"scenario is {state}")
        return Response(content=text, media_type="application/json")

    @app.delete("/scenarios/{job_id}")
    def cancel_scenario(job_id: str) -> dict:
        job = _get_job(job_id)
        with reg.lock:
            if job.state != QUEUED:
                raise HTTPException(
                    status_code=409, detail=f"cannot cancel a {job.state} scenario"
                )
            if job.future is not None and not job.future.cancel():
                raise HTTPException(status_code=409, detail="scenario already started")
            # stays within the four job states: a canceled run is a failed one
            job.state = FAILED
            job.error = "canceled before start"
            return job.status()

    @app.get("/health")
    def health() -> dict:
        with reg.lock:
            counts = {s: 0 for s in (QUEUED, RUNNING, DONE, FAILED)}
            for job in reg.jobs.values():
                counts[job.state] += 1
            return {"status": "ok", "datasets": len(reg.datasets), "jobs": counts}

    return app
