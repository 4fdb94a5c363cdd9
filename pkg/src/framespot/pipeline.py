"""End-to-end orchestration: sample -> embed -> (classify) -> prior -> score.

Frame embeddings are cached per (video hash, rate, backend fingerprint),
so rescoring with a new keyword, photo set, or text prompt touches no
video decoding; only prior construction and dot products rerun. Artifact
ids are deterministic content hashes, making reruns idempotent.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Callable

import numpy as np

from . import media, select
from .classify import ActivityLabelSet, classify_activity, load_labels
from .config import AppConfig
from .embedding import BackendSpec, EmbeddingBackend, StubBackend, load_backend
from .media import Interval
from .prior import (
    DEFAULT_PHOTO_COUNT,
    LocalFolderProvider,
    PhotoProvider,
    PriorProfile,
    build_prior,
    build_prior_from_images,
)
from .score import (
    FrameEmbeddingSeries,
    ScoreSeries,
    build_score_series,
    score_frames,
    score_frames_text,
)
from .store import ProjectStore, file_sha256, stable_id

log = logging.getLogger(__name__)

ProgressFn = Callable[[str, float], None]

_EMBED_BATCH = 32


def _noop_progress(phase: str, fraction: float) -> None:
    pass


def make_backend(config: AppConfig) -> EmbeddingBackend:
    if config.backend == "stub":
        return StubBackend(dim=config.dim)
    if config.backend == "torchscript":
        if not config.model_path:
            raise ValueError(
                "no model configured: set model_path (or FRAMESPOT_MODEL), "
                "or use the stub backend"
            )
        spec = BackendSpec(
            model_path=config.model_path,
            dim=config.dim,
            input_resolution=config.input_resolution,
            preprocessing=config.preprocessing,
        )
        return load_backend(spec)
    raise ValueError(f"unknown backend kind: {config.backend!r}")


def compute_frame_embeddings(
    video_path: str | os.PathLike,
    rate: float,
    backend: EmbeddingBackend,
    decoder: str | None = None,
    progress: ProgressFn = _noop_progress,
    info: media.MediaInfo | None = None,
) -> FrameEmbeddingSeries:
    """Sample frames and encode them in batches, streaming the video once."""
    info = info or media.probe(video_path, decoder)
    video_hash = file_sha256(video_path)
    chunks: list[np.ndarray] = []
    timestamps: list[float] = []
    batch: list[np.ndarray] = []

    def flush():
        if batch:
            chunks.append(backend.encode_image_batch(batch))
            batch.clear()

    for frame in media.sample_frames(video_path, rate, decoder=decoder, info=info):
        batch.append(frame.image)
        timestamps.append(frame.timestamp)
        if len(batch) >= _EMBED_BATCH:
            flush()
            progress("embedding", min(1.0, frame.timestamp / info.duration))
    flush()
    progress("embedding", 1.0)
    return FrameEmbeddingSeries(
        embeddings=np.concatenate(chunks, axis=0),
        timestamps=np.asarray(timestamps, dtype=np.float64),
        video_hash=video_hash,
        sampling_rate=rate,
        backend_fingerprint=backend.fingerprint,
    )


def ensure_frame_embeddings(
    store: ProjectStore,
    video_path: str | os.PathLike,
    rate: float,
    backend: EmbeddingBackend,
    decoder: str | None = None,
    progress: ProgressFn = _noop_progress,
) -> FrameEmbeddingSeries:
    """Cached frame embeddings for (video, rate, backend), computing on miss."""
    video_hash = file_sha256(video_path)
    cached = store.lookup_embeddings(video_hash, rate, backend.fingerprint)
    if cached is not None:
        return cached
    progress("sampling", 0.0)
    info = media.probe(video_path, decoder)
    progress("sampling", 1.0)
    progress("embedding", 0.0)
    series = compute_frame_embeddings(
        video_path, rate, backend, decoder=decoder, progress=progress, info=info
    )
    store.cache_embeddings(series)
    return series


# -- deterministic artifact ids -------------------------------------------


def prior_id_for_keyword(keyword: str, provider_fp: str, backend_fp: str, n: int) -> str:
    return stable_id("prior-keyword", keyword, provider_fp, backend_fp, n)


def prior_id_for_photos(photo_paths: list[str], backend_fp: str) -> str:
    hashes = [file_sha256(p) for p in photo_paths]
    return stable_id("prior-photos", hashes, backend_fp)


def series_id_for(video_hash: str, rate: float, backend_fp: str,
                  provenance: dict, smooth_window: int | None) -> str:
    return stable_id("scores", video_hash, rate, backend_fp, provenance, smooth_window)


# -- prior resolution -------------------------------------------------------


def resolve_prior(
    store: ProjectStore,
    backend: EmbeddingBackend,
    keyword: str | None = None,
    photo_paths: list[str] | None = None,
    provider: PhotoProvider | None = None,
    n_photos: int = DEFAULT_PHOTO_COUNT,
) -> tuple[str, PriorProfile]:
    """Load a cached prior or build and persist a new one."""
    if photo_paths:
        paths = [str(p) for p in photo_paths]
        prior_id = prior_id_for_photos(paths, backend.fingerprint)
        try:
            return prior_id, store.load_prior(prior_id)
        except Exception:
            pass
        from PIL import Image

        images = [np.asarray(Image.open(p).convert("RGB")) for p in paths]
        profile = build_prior_from_images(images, keyword or "", backend, refs=paths)
    else:
        if not keyword:
            raise ValueError("a keyword or explicit photo paths are required")
        if provider is None:
            raise ValueError(f"no photo provider configured for keyword {keyword!r}")
        prior_id = prior_id_for_keyword(
            keyword, provider.fingerprint(), backend.fingerprint, n_photos
        )
        try:
            return prior_id, store.load_prior(prior_id)
        except Exception:
            pass
        profile = build_prior(keyword, provider, backend, n=n_photos)
    store.save_prior(profile, prior_id)
    return prior_id, profile


def default_provider(config: AppConfig) -> PhotoProvider | None:
    if config.photo_root:
        return LocalFolderProvider(config.photo_root)
    return None


# -- scoring jobs ------------------------------------------------------------


def _score_with_prior(
    store: ProjectStore,
    frames: FrameEmbeddingSeries,
    prior_id: str,
    prior: PriorProfile,
    smooth_window: int | None,
) -> tuple[str, ScoreSeries]:
    provenance = {"kind": "prior", "keyword": prior.keyword, "prior_id": prior_id}
    sid = series_id_for(frames.video_hash, frames.sampling_rate,
                        frames.backend_fingerprint, provenance, smooth_window)
    if store.has_scores(sid):
        return sid, store.load_scores(sid)
    raw = score_frames(prior, frames)
    series = build_score_series(raw, frames, provenance, smooth_window)
    store.save_scores(series, sid)
    return sid, series


def _score_with_text(
    store: ProjectStore,
    frames: FrameEmbeddingSeries,
    prompt: str,
    backend: EmbeddingBackend,
    smooth_window: int | None,
) -> tuple[str, ScoreSeries]:
    provenance = {"kind": "text", "prompt": prompt}
    sid = series_id_for(frames.video_hash, frames.sampling_rate,
                        frames.backend_fingerprint, provenance, smooth_window)
    if store.has_scores(sid):
        return sid, store.load_scores(sid)
    raw = score_frames_text(prompt, frames, backend)
    series = build_score_series(raw, frames, provenance, smooth_window)
    store.save_scores(series, sid)
    return sid, series


def run_analysis(
    store: ProjectStore,
    video_path: str | os.PathLike,
    backend: EmbeddingBackend,
    keyword: str | None = None,
    photo_paths: list[str] | None = None,
    text_prompt: str | None = None,
    rate: float = 1.0,
    decoder: str | None = None,
    provider: PhotoProvider | None = None,
    labels_path: str | None = None,
    n_photos: int = DEFAULT_PHOTO_COUNT,
    smooth_window: int | None = None,
    progress: ProgressFn = _noop_progress,
):
    """Full pipeline for one video; returns the saved manifest and series id.

    With no keyword, photos, or prompt, the activity classifier picks the
    keyword (recorded in the manifest). Classification runs inside the
    "prior" phase.
    """
    video_path = str(video_path)
    frames = ensure_frame_embeddings(
        store, video_path, rate, backend, decoder=decoder, progress=progress
    )

    progress("prior", 0.0)
    if text_prompt:
        keyword_used = keyword
        prior_id = None
    else:
        keyword_used = keyword
        if not photo_paths and not keyword_used:
            labels = ActivityLabelSet.build(load_labels(labels_path), backend)
            ranked = classify_activity(frames, labels, top_k=1)
            keyword_used = ranked[0][0]
            log.info("classifier selected activity %r", keyword_used)
        prior_id, prior = resolve_prior(
            store, backend,
            keyword=keyword_used,
            photo_paths=photo_paths,
            provider=provider,
            n_photos=n_photos,
        )
    progress("prior", 1.0)

    progress("scoring", 0.0)
    if text_prompt:
        sid, series = _score_with_text(store, frames, text_prompt, backend, smooth_window)
    else:
        sid, series = _score_with_prior(store, frames, prior_id, prior, smooth_window)
    progress("scoring", 1.0)

    from .store import ProjectManifest

    try:
        manifest = store.load_manifest(check_references=False)
    except Exception:
        manifest = ProjectManifest(
            project_id=store.project_id,
            video_path=video_path,
            video_hash=frames.video_hash,
            sampling_rate=rate,
            backend_fingerprint=backend.fingerprint,
        )
    manifest.keyword = keyword_used if keyword_used else manifest.keyword
    if prior_id and prior_id not in manifest.prior_ids:
        manifest.prior_ids.append(prior_id)
    if sid not in manifest.score_series_ids:
        manifest.score_series_ids.append(sid)
    store.save_manifest(manifest)
    progress("done", 1.0)
    return manifest, sid, series


def run_rescore(
    store: ProjectStore,
    backend: EmbeddingBackend,
    keyword: str | None = None,
    photo_paths: list[str] | None = None,
    text_prompt: str | None = None,
    provider: PhotoProvider | None = None,
    n_photos: int = DEFAULT_PHOTO_COUNT,
    smooth_window: int | None = None,
    progress: ProgressFn = _noop_progress,
):
    """Rescore an analyzed project against a new keyword/photos/prompt.

    Requires the frame-embedding cache to be warm (it is after any
    successful run_analysis); no video decoding happens here.
    """
    manifest = store.load_manifest(check_references=False)
    frames = store.lookup_embeddings(
        manifest.video_hash, manifest.sampling_rate, manifest.backend_fingerprint
    )
    if frames is None:
        raise ValueError(
            "frame-embedding cache is cold for this project; run the full "
            "analysis first"
        )
    progress("prior", 0.0)
    prior_id = None
    if not text_prompt:
        prior_id, prior = resolve_prior(
            store, backend,
            keyword=keyword,
            photo_paths=photo_paths,
            provider=provider,
            n_photos=n_photos,
        )
    progress("prior", 1.0)
    progress("scoring", 0.0)
    if text_prompt:
        sid, series = _score_with_text(store, frames, text_prompt, backend, smooth_window)
    else:
        sid, series = _score_with_prior(store, frames, prior_id, prior, smooth_window)
    progress("scoring", 1.0)
    if prior_id and prior_id not in manifest.prior_ids:
        manifest.prior_ids.append(prior_id)
    if sid not in manifest.score_series_ids:
        manifest.score_series_ids.append(sid)
    store.save_manifest(manifest)
    progress("done", 1.0)
    return manifest, sid, series


# -- selection + export ------------------------------------------------------


def select_highlights(
    series: ScoreSeries,
    mode: str = "auto",
    length_seconds: float = 10.0,
    k: int = 3,
    min_separation_seconds: float | None = None,
) -> list[select.HighlightResult]:
    if mode == "auto":
        return [select.best_window(series, length_seconds)]
    if mode == "peaks":
        min_sep = min_separation_seconds if min_separation_seconds is not None else length_seconds
        return select.top_peaks(series, k, min_sep, length_seconds)
    raise ValueError(f"unknown selection mode: {mode!r}")


def export_intervals(
    store: ProjectStore,
    video_path: str | os.PathLike,
    intervals: list[Interval],
    decoder: str | None = None,
) -> Path:
    """Cut one clip, or a montage for several intervals, into exports/."""
    if not intervals:
        raise ValueError("nothing to export")
    info = media.probe(video_path, decoder)
    clamped = [
        Interval(iv.start, min(iv.end, info.duration)) for iv in intervals
    ]
    for iv in clamped:
        iv.validate_against(info.duration)
    tag = stable_id("export", [(iv.start, iv.end) for iv in clamped])
    out = store.export_path(f"highlight-{tag}.mp4")
    if len(clamped) == 1:
        media.cut_clip(video_path, clamped[0], out, decoder=decoder, info=info)
    else:
        results = [
            select.HighlightResult(interval=iv, mean_score=0.0, sum_score=0.0, rank=i + 1)
            for i, iv in enumerate(clamped)
        ]
        select.assemble_montage(video_path, results, out, decoder=decoder)
    manifest = store.load_manifest(check_references=False)
    record = {
        "intervals": [[iv.start, iv.end] for iv in clamped],
        "path": str(out),
    }
    if record not in manifest.exports:
        manifest.exports.append(record)
    store.save_manifest(manifest)
    return out


def paired_highlight_clips(
    store: ProjectStore,
    video_path: str | os.PathLike,
    backend: EmbeddingBackend,
    keyword: str,
    out_dir: str | os.PathLike,
    text_prompt: str | None = None,
    provider: PhotoProvider | None = None,
    photo_paths: list[str] | None = None,
    rate: float = 1.0,
    length_seconds: float = 10.0,
    decoder: str | None = None,
    n_photos: int = DEFAULT_PHOTO_COUNT,
) -> dict:
    """Produce the photo-prior clip and the text-baseline clip side by side.

    Both conditions share the same cached frame embeddings and selector,
    differing only in how raw scores are produced.
    """
    prompt = text_prompt or keyword
    _, sid_prior, series_prior = run_analysis(
        store, video_path, backend,
        keyword=keyword, photo_paths=photo_paths,
        rate=rate, decoder=decoder, provider=provider, n_photos=n_photos,
    )
    _, sid_text, series_text = run_rescore(
        store, backend, text_prompt=prompt,
    )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = {}
    for name, sid, series in (
        ("prior", sid_prior, series_prior),
        ("text", sid_text, series_text),
    ):
        highlight = select.best_window(series, length_seconds)
        info = media.probe(video_path, decoder)
        iv = Interval(highlight.interval.start,
                      min(highlight.interval.end, info.duration))
        clip = out_dir / f"{name}-condition.mp4"
        media.cut_clip(video_path, iv, clip, decoder=decoder, info=info)
        results[name] = {
            "series_id": sid,
            "interval": [iv.start, iv.end],
            "mean_score": highlight.mean_score,
            "clip": str(clip),
        }
    return results
