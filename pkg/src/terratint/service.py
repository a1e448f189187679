"""HTTP JSON API around the transfer pipeline.

Jobs are held in memory and executed one at a time on a worker thread
(FIFO); results are immutable once done. Every JSON response carries the
schema version. An optional static directory serves the explorer UI, and
an optional persist directory receives manifests and pareto fronts of
completed jobs.
"""

from __future__ import annotations

import io
import json
import logging
import tempfile
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from PIL import Image
from pydantic import BaseModel, Field, ValidationError

from .colors import LabColor
from .grid import grid_to_json
from .optimize import OptimizerConfig, archive_to_json, solution_to_json
from .pipeline import (
    SCHEMA_VERSION,
    AnalysisConfig,
    RenderConfig,
    StageError,
    TransferResult,
    analyze_image,
    manifest_digest,
    render_candidate,
    run_transfer,
)
from .scoring import ConventionSpec, SchemeMode, ScoringParams

logger = logging.getLogger(__name__)


class ConventionIn(BaseModel):
    zone: int
    L: float
    a: float
    b: float


class JobParams(BaseModel):
    """Parameters accepted by POST /api/jobs (the params form field)."""

    mode: str = "graded"
    zones: int = Field(default=9, ge=2)
    k: int = Field(default=3, ge=1, le=3)
    t: int = 1
    gamma: float = Field(default=10.0, gt=0)
    alpha: float = Field(default=10.0, gt=0)
    aerial: bool = True
    conventions: list[ConventionIn] = []
    seed: int = 0
    grid_size: int = Field(default=16, ge=2)
    delta_min: float = 10.0
    palette_size: int = Field(default=64, ge=1)
    population: int = Field(default=40, ge=2)
    iterations: int = Field(default=500, ge=0)


@dataclass
class Job:
    id: str
    params: JobParams
    image_path: Path
    dem_path: Path
    status: str = "pending"  # pending | running | done | failed
    error: str | None = None
    result: TransferResult | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


class JobStore:
    def __init__(self, persist_dir: Path | None = None):
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()
        self._executor = ThreadPoolExecutor(max_workers=1)
        self._workdir = Path(tempfile.mkdtemp(prefix="terratint-jobs-"))
        self.persist_dir = persist_dir

    def create(self, params: JobParams, image_bytes: bytes, image_name: str,
               dem_bytes: bytes, dem_name: str, sidecar_bytes: bytes | None) -> Job:
        job_id = uuid.uuid4().hex[:12]
        job_dir = self._workdir / job_id
        job_dir.mkdir(parents=True)
        image_path = job_dir / ("image" + Path(image_name).suffix.lower())
        image_path.write_bytes(image_bytes)
        dem_path = job_dir / ("dem" + Path(dem_name).suffix.lower())
        dem_path.write_bytes(dem_bytes)
        if sidecar_bytes is not None:
            dem_path.with_suffix(".json").write_bytes(sidecar_bytes)
        job = Job(id=job_id, params=params, image_path=image_path, dem_path=dem_path)
        with self._lock:
            self._jobs[job_id] = job
        self._executor.submit(self._run, job)
        return job

    def get(self, job_id: str) -> Job:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise KeyError(job_id)
        return job

    def _run(self, job: Job) -> None:
        with job.lock:
            job.status = "running"
        try:
            p = job.params
            result = run_transfer(
                job.image_path,
                job.dem_path,
                params=ScoringParams(
                    k=p.k, t=p.t, gamma=p.gamma, alpha=p.alpha, aerial_enabled=p.aerial
                ),
                conventions=ConventionSpec(
                    assignments={c.zone: LabColor(c.L, c.a, c.b) for c in p.conventions}
                ),
                opt_config=OptimizerConfig(
                    population=p.population,
                    iterations=p.iterations,
                    seed=p.seed,
                    delta_min=p.delta_min,
                ),
                mode=SchemeMode(p.mode),
                n=p.zones,
                analysis=AnalysisConfig(
                    palette_size=p.palette_size, grid_size=p.grid_size, seed=p.seed
                ),
                render_cfg=RenderConfig(aerial_shade=p.aerial),
            )
            with job.lock:
                job.result = result
                job.status = "done"
            self._persist(job, result)
        except Exception as exc:
            logger.exception("job %s failed", job.id)
            with job.lock:
                job.error = str(exc)
                job.status = "failed"

    def _persist(self, job: Job, result: TransferResult) -> None:
        if self.persist_dir is None:
            return
        out = self.persist_dir / job.id
        out.mkdir(parents=True, exist_ok=True)
        (out / "manifest.json").write_text(json.dumps(result.manifest, indent=2, sort_keys=True))
        (out / "pareto.json").write_text(
            json.dumps(archive_to_json(result.archive), indent=2, sort_keys=True)
        )


def _job_payload(job: Job) -> dict:
    payload: dict = {"schema": SCHEMA_VERSION, "id": job.id, "status": job.status}
    if job.status == "failed":
        payload["error"] = job.error
    if job.status == "done" and job.result is not None:
        ordered = job.result.archive.sorted_solutions()
        payload["pareto"] = [
            {"index": i, "F_s": c.f_s, "F_a": c.f_a} for i, c in enumerate(ordered)
        ]
        payload["midpoint_index"] = (len(ordered) - 1) // 2
        payload["manifest_digest"] = manifest_digest(job.result.manifest)
    return payload


def _solution_or_404(job: Job, index: int):
    if job.status in ("pending", "running"):
        raise HTTPException(status_code=409, detail="job not done")
    if job.status == "failed":
        raise HTTPException(status_code=409, detail=f"job failed: {job.error}")
    assert job.result is not None
    ordered = job.result.archive.sorted_solutions()
    if not 0 <= index < len(ordered):
        raise HTTPException(status_code=404, detail=f"no solution {index}")
    return ordered[index]


def create_app(static_dir: Path | None = None, persist_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="terratint", version=SCHEMA_VERSION)
    store = JobStore(persist_dir=persist_dir)
    app.state.store = store

    @app.exception_handler(StageError)
    async def stage_error_handler(_, exc: StageError):
        return JSONResponse(status_code=500, content={"schema": SCHEMA_VERSION, "error": str(exc)})

    @app.get("/api/health")
    def health() -> dict:
        return {"schema": SCHEMA_VERSION, "status": "ok"}

    @app.post("/api/analyze")
    def analyze(image: UploadFile = File(...), grid_size: int = Form(16), seed: int = Form(0)):
        suffix = Path(image.filename or "image.png").suffix.lower() or ".png"
        with tempfile.NamedTemporaryFile(suffix=suffix, delete=False) as tmp:
            tmp.write(image.file.read())
            tmp_path = Path(tmp.name)
        try:
            try:
                grid = analyze_image(
                    tmp_path, AnalysisConfig(grid_size=grid_size, seed=seed)
                )
            except StageError as exc:
                if exc.stage == "load_image":
                    raise HTTPException(status_code=400, detail=str(exc)) from exc
                raise
            return {"schema": SCHEMA_VERSION, "grid": grid_to_json(grid)}
        finally:
            tmp_path.unlink(missing_ok=True)

    @app.post("/api/jobs")
    def submit_job(
        image: UploadFile = File(...),
        dem: UploadFile = File(...),
        dem_sidecar: UploadFile | None = File(default=None),
        params: str = Form(default="{}"),
    ):
        try:
            job_params = JobParams.model_validate_json(params)
        except ValidationError as exc:
            raise HTTPException(status_code=400, detail=f"bad params: {exc}") from exc
        if job_params.mode not in ("graded", "continuous"):
            raise HTTPException(status_code=400, detail=f"bad mode {job_params.mode!r}")
        if job_params.t not in (1, -1):
            raise HTTPException(status_code=400, detail="t must be +1 or -1")
        job = store.create(
            job_params,
            image.file.read(),
            image.filename or "image.png",
            dem.file.read(),
            dem.filename or "dem.asc",
            dem_sidecar.file.read() if dem_sidecar is not None else None,
        )
        return {"schema": SCHEMA_VERSION, "id": job.id}

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str):
        try:
            job = store.get(job_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id}") from None
        return _job_payload(job)

    @app.get("/api/jobs/{job_id}/render")
    def job_render(job_id: str, solution: int = 0, width: int | None = None):
        try:
            job = store.get(job_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id}") from None
        candidate = _solution_or_404(job, solution)
        assert job.result is not None
        rendered = render_candidate(job.result, candidate)
        buf = io.BytesIO()
        if rendered.has_nodata:
            alpha = np.where(rendered.valid, 255, 0).astype("uint8")
            img = Image.fromarray(np.dstack([rendered.pixels, alpha]), mode="RGBA")
        else:
            img = Image.fromarray(rendered.pixels, mode="RGB")
        if width is not None and width > 0 and width != img.width:
            height = max(1, round(img.height * width / img.width))
            img = img.resize((width, height), Image.BOX)
        img.save(buf, format="PNG")
        return Response(content=buf.getvalue(), media_type="image/png")

    @app.get("/api/jobs/{job_id}/scheme")
    def job_scheme(job_id: str, solution: int = 0):
        try:
            job = store.get(job_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id}") from None
        candidate = _solution_or_404(job, solution)
        return {"schema": SCHEMA_VERSION, "index": solution, **solution_to_json(candidate)}

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
