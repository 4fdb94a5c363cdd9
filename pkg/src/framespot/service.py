"""Local HTTP service exposing the pipeline to the companion UI.

Long operations (analysis, rescoring) run as background jobs polled via
GET /jobs/{job_id}; score reads and thumbnails are synchronous. At most
one pipeline job runs per project (409 on conflict). Binds localhost by
default: the service shells out to media tools and reads arbitrary local
paths, so it is not a hardened public endpoint.
"""

from __future__ import annotations

import logging
import threading
import uuid
from dataclasses import asdict, dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import media, pipeline
from .config import AppConfig
from .errors import FramespotError, MediaError, StoreError
from .media import Interval
from .store import ProjectStore, file_sha256, stable_id

log = logging.getLogger(__name__)

_PHASE_ORDER = {"sampling": 0, "embedding": 1, "prior": 2, "scoring": 3, "done": 4, "failed": 5}


@dataclass
class JobStatus:
    job_id: str
    phase: str = "sampling"
    progress: float = 0.0
    error: str | None = None
    project_id: str | None = None
    series_id: str | None = None
    phases_seen: list[str] = field(default_factory=list)

    def update(self, phase: str, fraction: float) -> None:
        # phases advance monotonically; progress is non-decreasing per phase
        if _PHASE_ORDER[phase] > _PHASE_ORDER[self.phase]:
            self.phase = phase
            self.progress = fraction
        elif phase == self.phase:
            self.progress = max(self.progress, fraction)
        if phase not in self.phases_seen:
            self.phases_seen.append(phase)

    def fail(self, message: str) -> None:
        self.phase = "failed"
        self.error = message

    def to_json(self) -> dict:
        return asdict(self)


class CreateProjectRequest(BaseModel):
    video_path: str
    keyword: str | None = None
    rate: float | None = None


class RescoreRequest(BaseModel):
    keyword: str | None = None
    photo_paths: list[str] | None = None
    text_prompt: str | None = None
    smooth: int | None = None


class IntervalModel(BaseModel):
    start: float
    end: float


class SelectRequest(BaseModel):
    series_id: str | None = None
    mode: str = "auto"
    length: float = 10.0
    k: int | None = None
    min_separation: float | None = None


class ExportRequest(BaseModel):
    interval: IntervalModel | None = None
    intervals: list[IntervalModel] | None = None


class _ServiceState:
    def __init__(self, config: AppConfig):
        self.config = config
        self.jobs: dict[str, JobStatus] = {}
        self.active_project_jobs: dict[str, str] = {}
        self.media_info: dict[str, media.MediaInfo] = {}
        self.lock = threading.Lock()
        self._backend = None

    @property
    def backend(self):
        with self.lock:
            if self._backend is None:
                self._backend = pipeline.make_backend(self.config)
            return self._backend

    def store_for(self, project_id: str) -> ProjectStore:
        return ProjectStore(self.config.project_dir, project_id)

    def probe_cached(self, video_path: str) -> media.MediaInfo:
        key = str(Path(video_path).resolve())
        if key not in self.media_info:
            self.media_info[key] = media.probe(video_path, self.config.decoder_path)
        return self.media_info[key]

    def start_job(self, project_id: str, target, *args) -> JobStatus:
        with self.lock:
            if project_id in self.active_project_jobs:
                running = self.jobs[self.active_project_jobs[project_id]]
                raise HTTPException(
                    status_code=409,
                    detail={"message": "a job is already running for this project",
                            "job": running.to_json()},
                )
            job = JobStatus(job_id=uuid.uuid4().hex[:12], project_id=project_id)
            self.jobs[job.job_id] = job
            self.active_project_jobs[project_id] = job.job_id

        def run():
            try:
                target(job, *args)
                job.update("done", 1.0)
            except Exception as exc:  # job errors surface via status, not logs only
                log.exception("job %s failed", job.job_id)
                job.fail(str(exc))
            finally:
                with self.lock:
                    self.active_project_jobs.pop(project_id, None)

        threading.Thread(target=run, daemon=True).start()
        return job


def create_app(config: AppConfig | None = None) -> FastAPI:
    config = config or AppConfig.load()
    state = _ServiceState(config)
    app = FastAPI(title="framespot service")
    app.state.service = state

    def active_job(project_id: str) -> JobStatus | None:
        with state.lock:
            job_id = state.active_project_jobs.get(project_id)
        return state.jobs[job_id] if job_id else None

    def manifest_or_404(project_id: str):
        try:
            return state.store_for(project_id).load_manifest(check_references=False)
        except StoreError:
            # a running first job may not have written the manifest yet
            running = active_job(project_id)
            if running is not None:
                raise HTTPException(
                    status_code=409,
                    detail={"message": "project job still running", "job": running.to_json()},
                )
            raise HTTPException(status_code=404, detail=f"unknown project: {project_id}")

    @app.post("/projects")
    def create_project(req: CreateProjectRequest):
        if not Path(req.video_path).is_file():
            raise HTTPException(status_code=404, detail=f"video not found: {req.video_path}")
        rate = req.rate if req.rate is not None else config.sampling_rate
        if rate <= 0:
            raise HTTPException(status_code=422, detail=f"sampling rate must be positive: {rate}")
        video_hash = file_sha256(req.video_path)
        project_id = stable_id("project", video_hash, rate)

        def work(job: JobStatus):
            store = state.store_for(project_id)
            _, sid, _ = pipeline.run_analysis(
                store, req.video_path, state.backend,
                keyword=req.keyword,
                rate=rate,
                decoder=config.decoder_path,
                provider=pipeline.default_provider(config),
                labels_path=config.labels_path,
                n_photos=config.photos_per_prior,
                progress=job.update,
            )
            job.series_id = sid

        job = state.start_job(project_id, work)
        return {"project_id": project_id, "job_id": job.job_id}

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        job = state.jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job: {job_id}")
        return job.to_json()

    @app.get("/projects/{project_id}")
    def project_info(project_id: str):
        manifest = manifest_or_404(project_id)
        info = state.probe_cached(manifest.video_path)
        return {
            "manifest": manifest.to_json(),
            "duration": info.duration,
            "native_fps": info.native_fps,
        }

    @app.get("/projects/{project_id}/scores")
    def project_scores(project_id: str, series: str | None = Query(default=None)):
        manifest = manifest_or_404(project_id)
        store = state.store_for(project_id)
        sid = series or (manifest.score_series_ids[-1] if manifest.score_series_ids else None)
        if sid and store.has_scores(sid):
            payload = store.load_scores(sid).to_json()
            payload["series_id"] = sid
            return payload
        running = active_job(project_id)
        if running is not None:
            raise HTTPException(
                status_code=409,
                detail={"message": "scores not ready", "job": running.to_json()},
            )
        raise HTTPException(status_code=404, detail=f"unknown score series: {sid}")

    @app.get("/projects/{project_id}/thumb")
    def project_thumb(project_id: str, t: float = Query(...), max_edge: int = Query(default=320)):
        manifest = manifest_or_404(project_id)
        store = state.store_for(project_id)
        try:
            data = media.extract_thumbnail(
                manifest.video_path, t,
                max_edge=max_edge,
                decoder=config.decoder_path,
                cache_dir=store.dir / "thumbs",
                info=state.probe_cached(manifest.video_path),
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except MediaError as exc:
            raise HTTPException(status_code=500, detail=str(exc))
        return Response(content=data, media_type="image/jpeg")

    @app.get("/projects/{project_id}/priors/{prior_id}")
    def prior_info(project_id: str, prior_id: str):
        manifest_or_404(project_id)
        try:
            profile = state.store_for(project_id).load_prior(prior_id)
        except StoreError:
            raise HTTPException(status_code=404, detail=f"unknown prior: {prior_id}")
        return {
            "prior_id": prior_id,
            "keyword": profile.keyword,
            "photo_count": int(profile.photo_embeddings.shape[0]),
            "photo_refs": [Path(r).name if not r.startswith("http") else r
                           for r in profile.photo_refs],
            "created_at": profile.created_at,
        }

    @app.get("/projects/{project_id}/priors/{prior_id}/photos/{index}")
    def prior_photo(project_id: str, prior_id: str, index: int):
        manifest_or_404(project_id)
        try:
            profile = state.store_for(project_id).load_prior(prior_id)
        except StoreError:
            raise HTTPException(status_code=404, detail=f"unknown prior: {prior_id}")
        if not (0 <= index < len(profile.photo_refs)):
            raise HTTPException(status_code=404, detail=f"no photo at index {index}")
        ref = Path(profile.photo_refs[index])
        # only local exemplar files are served; remote refs stay remote
        if not ref.is_file():
            raise HTTPException(status_code=404, detail="photo source not on disk")
        import io

        from PIL import Image

        with Image.open(ref) as img:
            buf = io.BytesIO()
            img.convert("RGB").save(buf, format="JPEG", quality=85)
        return Response(content=buf.getvalue(), media_type="image/jpeg")

    @app.post("/projects/{project_id}/rescore")
    def rescore(project_id: str, req: RescoreRequest):
        manifest = manifest_or_404(project_id)
        given = [x for x in (req.keyword, req.photo_paths, req.text_prompt) if x]
        if len(given) != 1:
            raise HTTPException(
                status_code=422,
                detail="exactly one of keyword, photo_paths, or text_prompt is required",
            )
        backend = state.backend
        provider = pipeline.default_provider(config)
        if req.keyword and provider is None:
            raise HTTPException(
                status_code=422,
                detail="keyword rescoring needs a configured photo provider (photo_root)",
            )
        if req.photo_paths:
            missing = [p for p in req.photo_paths if not Path(p).is_file()]
            if missing:
                raise HTTPException(status_code=422, detail=f"photo paths not found: {missing}")

        if req.text_prompt:
            provenance = {"kind": "text", "prompt": req.text_prompt}
        elif req.photo_paths:
            prior_id = pipeline.prior_id_for_photos(req.photo_paths, backend.fingerprint)
            provenance = {"kind": "prior", "keyword": req.keyword or "", "prior_id": prior_id}
        else:
            prior_id = pipeline.prior_id_for_keyword(
                req.keyword, provider.fingerprint(), backend.fingerprint,
                config.photos_per_prior,
            )
            provenance = {"kind": "prior", "keyword": req.keyword, "prior_id": prior_id}
        series_id = pipeline.series_id_for(
            manifest.video_hash, manifest.sampling_rate, backend.fingerprint,
            provenance, req.smooth,
        )

        def work(job: JobStatus):
            store = state.store_for(project_id)
            _, sid, _ = pipeline.run_rescore(
                store, backend,
                keyword=req.keyword,
                photo_paths=req.photo_paths,
                text_prompt=req.text_prompt,
                provider=provider,
                n_photos=config.photos_per_prior,
                smooth_window=req.smooth,
                progress=job.update,
            )
            job.series_id = sid

        job = state.start_job(project_id, work)
        job.series_id = series_id
        return {"series_id": series_id, "job_id": job.job_id}

    @app.post("/projects/{project_id}/select")
    def select_endpoint(project_id: str, req: SelectRequest):
        manifest = manifest_or_404(project_id)
        store = state.store_for(project_id)
        sid = req.series_id or (manifest.score_series_ids[-1] if manifest.score_series_ids else None)
        if not sid or not store.has_scores(sid):
            raise HTTPException(status_code=404, detail=f"unknown score series: {sid}")
        series = store.load_scores(sid)
        try:
            results = pipeline.select_highlights(
                series,
                mode=req.mode,
                length_seconds=req.length,
                k=req.k if req.k is not None else 3,
                min_separation_seconds=req.min_separation,
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"series_id": sid, "results": [r.to_json() for r in results]}

    @app.post("/projects/{project_id}/export")
    def export_endpoint(project_id: str, req: ExportRequest):
        manifest = manifest_or_404(project_id)
        store = state.store_for(project_id)
        models = req.intervals if req.intervals else ([req.interval] if req.interval else [])
        if not models:
            raise HTTPException(status_code=422, detail="interval or intervals required")
        try:
            intervals = [Interval(m.start, m.end) for m in models]
            out = pipeline.export_intervals(
                store, manifest.video_path, intervals, decoder=config.decoder_path
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except FramespotError as exc:
            raise HTTPException(status_code=500, detail=str(exc))
        return {"path": str(out)}

    ui_dir = config.ui_dir
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def serve(config: AppConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")
