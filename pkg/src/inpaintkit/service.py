"""HTTP service exposing the pipeline to the web UI and remote clients.

Sessions bind an uploaded image to its segmentation candidates; edits run as
asynchronous jobs (enqueue, then poll) because real generative backends take
seconds to minutes.  Stores are in memory, guarded by locks, with optional
content-addressed persistence of uploaded images and results.

Endpoints (JSON unless noted):

* ``GET  /api/health``                      liveness probe
* ``POST /api/sessions``                    multipart upload (``file``), 201
* ``POST /api/sessions/{sid}/segment``      ``{points: [{x, y, label}]}``
* ``POST /api/sessions/{sid}/execute``      ``{mode, mask_index|mask_png, prompt?, config?}``, 202
* ``GET  /api/jobs/{jid}``                  job status and, when done, results

Images and masks travel as base64 PNG; JPEG is accepted on upload only.
Error bodies are ``{"error": <TypedName>, "detail": <message>}``.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import os
import queue
import threading
import time
import uuid
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import codec, mask_ops
from .backends import BackendRegistry, DEFAULT_REGISTRY
from .errors import (
    BadMask,
    ConfigError,
    DecodeError,
    DimensionTooLarge,
    EmptyMask,
    InpaintKitError,
    NoObjectFound,
    PointOutOfBounds,
)
from .model import ClickPoint, ClickPrompt, Image, Mask, Mode, PipelineConfig, PointLabel
from .pipeline import PipelineResult, run_pipeline

logger = logging.getLogger(__name__)

BIND_ENV = "INPAINTKIT_BIND"
PERSIST_DIR_ENV = "INPAINTKIT_PERSIST_DIR"

# Keys of PipelineConfig a client may override per execute request.
_OVERRIDABLE = (
    "dilate_radius_remove",
    "dilate_radius_fill_min",
    "dilate_fraction_fill",
    "open_radius",
    "working_resolution",
    "crop_margin",
    "seed",
)


@dataclass
class ServiceConfig:
    """Service settings; see README for the config file key set."""

    host: str = "127.0.0.1"
    port: int = 8787
    workers: int = 2
    session_ttl_seconds: float = 1800.0
    persist_dir: str | None = None
    expire_jobs_with_session: bool = False
    ui_dir: str | None = None
    segmenter_id: str = "region_grow"
    inpainter_id: str = "harmonic"
    generator_id: str = "pattern"
    dilate_radius_remove: int = 15
    dilate_radius_fill_min: int = 35
    dilate_fraction_fill: float = 0.10
    open_radius: int = 0
    working_resolution: int = 512
    crop_margin: float = 0.25

    @classmethod
    def load(cls, path: str | Path | None = None) -> "ServiceConfig":
        """Read a JSON config file, then apply environment overrides."""
        values: dict[str, Any] = {}
        if path is not None:
            raw = json.loads(Path(path).read_text())
            unknown = set(raw) - {f.name for f in dataclasses.fields(cls)}
            if unknown:
                raise ConfigError(f"unknown config keys: {sorted(unknown)}")
            values.update(raw)
        config = cls(**values)
        bind = os.environ.get(BIND_ENV)
        if bind:
            host, _, port = bind.rpartition(":")
            config.host = host or config.host
            config.port = int(port)
        persist = os.environ.get(PERSIST_DIR_ENV)
        if persist:
            config.persist_dir = persist
        return config

    def pipeline_defaults(self, mode: Mode) -> PipelineConfig:
        return PipelineConfig(
            mode=mode,
            dilate_radius_remove=self.dilate_radius_remove,
            dilate_radius_fill_min=self.dilate_radius_fill_min,
            dilate_fraction_fill=self.dilate_fraction_fill,
            open_radius=self.open_radius,
            working_resolution=self.working_resolution,
            crop_margin=self.crop_margin,
            segmenter_id=self.segmenter_id,
            inpainter_id=self.inpainter_id,
            generator_id=self.generator_id,
        )


@dataclass
class Session:
    session_id: str
    image: Image
    candidates: list = field(default_factory=list)
    selected_mask: Mask | None = None
    created_at: float = field(default_factory=time.time)
    last_used: float = field(default_factory=time.monotonic)


@dataclass
class Job:
    job_id: str
    session_id: str
    mode: Mode
    config: PipelineConfig
    prompt: str | None
    mask: Mask
    image: Image
    status: str = "queued"  # queued -> running -> done | failed
    result: PipelineResult | None = None
    error_name: str | None = None
    error_detail: str | None = None


class SessionStore:
    def __init__(self, ttl_seconds: float):
        self.ttl = ttl_seconds
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def create(self, image: Image) -> Session:
        session = Session(session_id=uuid.uuid4().hex, image=image)
        with self._lock:
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        """Return the live session, refreshing its idle clock; purge if expired."""
        now = time.monotonic()
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                return None
            if now - session.last_used > self.ttl:
                del self._sessions[session_id]
                return None
            session.last_used = now
            return session

    def sweep(self) -> list[str]:
        """Drop expired sessions; returns the ids removed."""
        now = time.monotonic()
        with self._lock:
            dead = [
                sid
                for sid, session in self._sessions.items()
                if now - session.last_used > self.ttl
            ]
            for sid in dead:
                del self._sessions[sid]
        return dead


class JobStore:
    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._jobs: dict[str, Job] = {}

    def add(self, job: Job) -> None:
        with self._lock:
            self._jobs[job.job_id] = job

    def get(self, job_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)

    def transition(self, job_id: str, expected: str, new: str) -> bool:
        """Atomically move a job along queued -> running -> done|failed."""
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None or job.status != expected:
                return False
            job.status = new
            return True

    def fail(self, job_id: str, name: str, detail: str) -> None:
        with self._lock:
            job = self._jobs[job_id]
            job.status = "failed"
            job.error_name = name
            job.error_detail = detail

    def complete(self, job_id: str, result: PipelineResult) -> None:
        with self._lock:
            job = self._jobs[job_id]
            job.result = result
            job.status = "done"

    def cancel_queued_for_session(self, session_id: str) -> None:
        with self._lock:
            for job in self._jobs.values():
                if job.session_id == session_id and job.status == "queued":
                    job.status = "failed"
                    job.error_name = "SessionExpired"
                    job.error_detail = "session expired before the job ran"


class JobRunner:
    """Bounded thread pool draining the job queue."""

    def __init__(self, jobs: JobStore, registry: BackendRegistry, workers: int, persist):
        self._jobs = jobs
        self._registry = registry
        self._queue: queue.Queue[str | None] = queue.Queue()
        self._threads = [
            threading.Thread(target=self._loop, name=f"inpaintkit-worker-{i}", daemon=True)
            for i in range(max(1, workers))
        ]
        self._persist = persist
        self._started = False
        self._start_lock = threading.Lock()

    def ensure_started(self) -> None:
        with self._start_lock:
            if not self._started:
                for thread in self._threads:
                    thread.start()
                self._started = True

    def stop(self) -> None:
        if not self._started:
            return
        for _ in self._threads:
            self._queue.put(None)

    def submit(self, job_id: str) -> None:
        self.ensure_started()
        self._queue.put(job_id)

    def _loop(self) -> None:
        while True:
            job_id = self._queue.get()
            if job_id is None:
                return
            if not self._jobs.transition(job_id, "queued", "running"):
                continue
            job = self._jobs.get(job_id)
            try:
                result = run_pipeline(
                    job.image,
                    None,
                    job.prompt,
                    job.config,
                    registry=self._registry,
                    object_mask=job.mask,
                )
                self._jobs.complete(job_id, result)
                if self._persist:
                    self._persist(result)
            except InpaintKitError as exc:
                self._jobs.fail(job_id, type(exc).__name__, str(exc))
            except Exception as exc:  # pragma: no cover - defensive
                logger.exception("job %s crashed", job_id)
                self._jobs.fail(job_id, "InternalError", str(exc))


class PointIn(BaseModel):
    x: int
    y: int
    label: str = Field(default="positive", pattern="^(positive|negative)$")


class SegmentIn(BaseModel):
    points: list[PointIn] = Field(min_length=1)


class ExecuteIn(BaseModel):
    mode: str = Field(pattern="^(remove|fill|replace)$")
    mask_index: int | None = None
    mask_png: str | None = None
    prompt: str | None = None
    config: dict[str, Any] | None = None


def _error(status: int, name: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": name, "detail": detail})


def _persist_bytes(directory: Path, data: bytes, suffix: str = ".png") -> Path:
    digest = hashlib.sha256(data).hexdigest()
    path = directory / f"{digest}{suffix}"
    if not path.exists():
        path.write_bytes(data)
    return path


def create_app(
    config: ServiceConfig | None = None,
    registry: BackendRegistry = DEFAULT_REGISTRY,
) -> FastAPI:
    config = config or ServiceConfig()
    sessions = SessionStore(config.session_ttl_seconds)
    jobs = JobStore()

    persist_dir = Path(config.persist_dir) if config.persist_dir else None
    if persist_dir:
        persist_dir.mkdir(parents=True, exist_ok=True)

    def persist_result(result: PipelineResult) -> None:
        if persist_dir:
            _persist_bytes(persist_dir, codec.encode_image_png(result.output))
            _persist_bytes(persist_dir, codec.encode_mask_png(result.edit_mask))

    runner = JobRunner(jobs, registry, config.workers, persist_result if persist_dir else None)

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        runner.ensure_started()
        yield
        runner.stop()

    app = FastAPI(title="inpaintkit service", version="0.1.0", lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.config = config
    app.state.sessions = sessions
    app.state.jobs = jobs

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/api/sessions", status_code=201)
    async def upload_image(file: UploadFile) -> Any:
        data = await file.read()
        try:
            image = codec.decode_image(data)
        except DimensionTooLarge as exc:
            return _error(413, "DimensionTooLarge", str(exc))
        except (DecodeError, InpaintKitError) as exc:
            return _error(400, "DecodeError", str(exc))
        if persist_dir:
            _persist_bytes(persist_dir, data, suffix=Path(file.filename or "u.png").suffix or ".png")
        session = sessions.create(image)
        return {
            "session_id": session.session_id,
            "width": image.width,
            "height": image.height,
        }

    def _expire(session_id: str) -> JSONResponse:
        if config.expire_jobs_with_session:
            jobs.cancel_queued_for_session(session_id)
        return _error(404, "UnknownSession", f"no live session {session_id!r}")

    @app.post("/api/sessions/{session_id}/segment")
    def segment_endpoint(session_id: str, body: SegmentIn) -> Any:
        session = sessions.get(session_id)
        if session is None:
            return _expire(session_id)
        points = tuple(
            ClickPoint(p.x, p.y, PointLabel(p.label)) for p in body.points
        )
        try:
            clicks = ClickPrompt(points)
            clicks.check_bounds(session.image.width, session.image.height)
        except PointOutOfBounds as exc:
            return _error(422, "PointOutOfBounds", str(exc))
        try:
            candidates = registry.segmenter(config.segmenter_id).segment(
                session.image, clicks
            )
        except NoObjectFound as exc:
            return _error(409, "NoObjectFound", str(exc))
        session.candidates = candidates
        payload = []
        for index, cand in enumerate(candidates):
            box = mask_ops.bbox(cand.mask)
            payload.append(
                {
                    "index": index,
                    "score": cand.score,
                    "area": cand.mask.area,
                    "bbox": {"x0": box.x0, "y0": box.y0, "w": box.w, "h": box.h},
                    "mask_png": codec.mask_to_base64_png(cand.mask),
                }
            )
        return {"candidates": payload}

    @app.post("/api/sessions/{session_id}/execute", status_code=202)
    def execute_endpoint(session_id: str, body: ExecuteIn) -> Any:
        session = sessions.get(session_id)
        if session is None:
            return _expire(session_id)
        mode = Mode(body.mode)
        if mode in (Mode.FILL, Mode.REPLACE) and not (body.prompt or "").strip():
            return _error(422, "MissingPrompt", f"{mode.value} mode requires a prompt")

        if body.mask_png is not None:
            try:
                mask = codec.decode_mask(codec.from_base64(body.mask_png))
            except (BadMask, DecodeError) as exc:
                return _error(422, "BadMask", str(exc))
            if (mask.width, mask.height) != (session.image.width, session.image.height):
                return _error(
                    422,
                    "BadMask",
                    f"mask {mask.width}x{mask.height} does not match image "
                    f"{session.image.width}x{session.image.height}",
                )
        elif body.mask_index is not None:
            if not 0 <= body.mask_index < len(session.candidates):
                return _error(
                    422,
                    "BadMask",
                    f"mask_index {body.mask_index} out of range "
                    f"({len(session.candidates)} candidates stored)",
                )
            mask = session.candidates[body.mask_index].mask
        else:
            return _error(422, "BadMask", "provide mask_index or mask_png")

        # An all-zero mask must be rejected here, never run as a no-op.
        if mask.area == 0:
            return _error(422, "EmptyMask", "override mask has no set pixels")

        overrides = body.config or {}
        unknown = set(overrides) - set(_OVERRIDABLE)
        if unknown:
            return _error(422, "ConfigError", f"unknown config overrides: {sorted(unknown)}")
        try:
            pipeline_config = dataclasses.replace(
                config.pipeline_defaults(mode), **overrides
            )
        except (ConfigError, TypeError) as exc:
            return _error(422, "ConfigError", str(exc))

        session.selected_mask = mask
        job = Job(
            job_id=uuid.uuid4().hex,
            session_id=session_id,
            mode=mode,
            config=pipeline_config,
            prompt=body.prompt,
            mask=mask,
            image=session.image,
        )
        jobs.add(job)
        runner.submit(job.job_id)
        return {"job_id": job.job_id}

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str) -> Any:
        job = jobs.get(job_id)
        if job is None:
            return _error(404, "UnknownJob", f"no job {job_id!r}")
        view: dict[str, Any] = {
            "job_id": job.job_id,
            "session_id": job.session_id,
            "mode": job.mode.value,
            "status": job.status,
        }
        if job.status == "failed":
            view["error"] = {"error": job.error_name, "detail": job.error_detail}
        if job.status == "done" and job.result is not None:
            view["result"] = {
                "image_png": codec.image_to_base64_png(job.result.output),
                "edit_mask_png": codec.mask_to_base64_png(job.result.edit_mask),
                "timings_ms": job.result.timings_ms,
            }
        return view

    _mount_ui(app, config)
    return app


def _mount_ui(app: FastAPI, config: ServiceConfig) -> None:
    ui_dir = config.ui_dir
    if not ui_dir:
        return
    root = Path(ui_dir)
    if not root.is_dir():
        logger.warning("ui_dir %s does not exist; skipping static mount", ui_dir)
        return
    from fastapi.staticfiles import StaticFiles

    app.mount("/", StaticFiles(directory=root, html=True), name="ui")


def main(argv: list[str] | None = None) -> None:
    """Run the service under uvicorn."""
    parser = argparse.ArgumentParser(prog="inpaintkit-service")
    parser.add_argument("--config", help="path to JSON config file")
    parser.add_argument("--host")
    parser.add_argument("--port", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--ui-dir")
    args = parser.parse_args(argv)

    config = ServiceConfig.load(args.config)
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    if args.workers:
        config.workers = args.workers
    if args.ui_dir:
        config.ui_dir = args.ui_dir

    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")


if __name__ == "__main__":
    main()
