"""Project persistence and content-hash-keyed caches.

Layout under a project directory:

    <root>/<project_id>/
        manifest.json
        embeddings/   frame-embedding series (JSON meta + little-endian f32 blob)
        priors/       prior profiles (JSON)
        scores/       score series (JSON)
        exports/      cut clips and montages
        thumbs/       thumbnail JPEG cache

Artifacts are immutable once written; rescoring creates new ids. Writes
go through write-temp-then-rename so readers never observe partial files.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import StoreError

MANIFEST_SCHEMA_VERSION = 1
EMBEDDING_SCHEMA_VERSION = 1

_hash_cache: dict[tuple[str, int, int], str] = {}


def file_sha256(path: str | os.PathLike) -> str:
    """Content hash of a file; memoized on (realpath, size, mtime)."""
    p = Path(path)
    st = p.stat()
    key = (str(p.resolve()), st.st_size, st.st_mtime_ns)
    cached = _hash_cache.get(key)
    if cached is not None:
        return cached
    h = hashlib.sha256()
    with open(p, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    digest = h.hexdigest()
    _hash_cache[key] = digest
    return digest


def atomic_write_bytes(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_json(path: Path, obj) -> None:
    atomic_write_bytes(path, json.dumps(obj, indent=2, sort_keys=True).encode("utf-8"))


def stable_id(*parts) -> str:
    """Deterministic short id from the canonical JSON of its parts."""
    blob = json.dumps(parts, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha1(blob).hexdigest()[:12]


@dataclass
class ProjectManifest:
    project_id: str
    video_path: str
    video_hash: str
    sampling_rate: float
    backend_fingerprint: str
    keyword: str | None = None
    prior_ids: list[str] = field(default_factory=list)
    score_series_ids: list[str] = field(default_factory=list)
    exports: list[dict] = field(default_factory=list)  # {"interval": [s, e], "path": ...}
    schema_version: int = MANIFEST_SCHEMA_VERSION

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "ProjectManifest":
        version = data.get("schema_version", 0)
        if version > MANIFEST_SCHEMA_VERSION:
            raise StoreError(
                f"manifest schema version {version} is newer than supported "
                f"({MANIFEST_SCHEMA_VERSION})"
            )
        known = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
        return cls(**{k: v for k, v in data.items() if k in known})


class ProjectStore:
    """Filesystem store for one project directory."""

    def __init__(self, root: str | os.PathLike, project_id: str):
        self.project_id = project_id
        self.dir = Path(root) / project_id
        for sub in ("embeddings", "priors", "scores", "exports", "thumbs"):
            (self.dir / sub).mkdir(parents=True, exist_ok=True)

    @property
    def manifest_path(self) -> Path:
        return self.dir / "manifest.json"

    def save_manifest(self, manifest: ProjectManifest) -> Path:
        atomic_write_json(self.manifest_path, manifest.to_json())
        return self.manifest_path

    def load_manifest(self, check_references: bool = True) -> ProjectManifest:
        if not self.manifest_path.is_file():
            raise StoreError(f"no manifest at {self.manifest_path}")
        manifest = ProjectManifest.from_json(json.loads(self.manifest_path.read_text()))
        if check_references:
            dangling = [
                pid for pid in manifest.prior_ids
                if not (self.dir / "priors" / f"{pid}.json").is_file()
            ]
            dangling += [
                sid for sid in manifest.score_series_ids
                if not (self.dir / "scores" / f"{sid}.json").is_file()
            ]
            if dangling:
                raise StoreError(f"manifest references missing artifacts: {dangling}")
        return manifest

    # -- frame-embedding cache -------------------------------------------

    def _embedding_key(self, video_hash: str, rate: float, backend_fingerprint: str) -> str:
        return stable_id("embeddings", video_hash, rate, backend_fingerprint)

    def cache_embeddings(self, series) -> str:
        """Persist a FrameEmbeddingSeries; returns its cache key."""
        key = self._embedding_key(series.video_hash, series.sampling_rate,
                                  series.backend_fingerprint)
        base = self.dir / "embeddings" / key
        blob = np.ascontiguousarray(series.embeddings, dtype="<f4").tobytes()
        meta = {
            "schema_version": EMBEDDING_SCHEMA_VERSION,
            "video_hash": series.video_hash,
            "sampling_rate": series.sampling_rate,
            "backend_fingerprint": series.backend_fingerprint,
            "count": int(series.embeddings.shape[0]),
            "dim": int(series.embeddings.shape[1]),
            "timestamps": [float(t) for t in series.timestamps],
            "blob": f"{key}.f32",
        }
        atomic_write_bytes(base.with_suffix(".f32"), blob)
        atomic_write_json(base.with_suffix(".json"), meta)
        return key

    def lookup_embeddings(self, video_hash: str, rate: float, backend_fingerprint: str):
        """Return the cached FrameEmbeddingSeries, or None on a miss."""
        from .score import FrameEmbeddingSeries

        key = self._embedding_key(video_hash, rate, backend_fingerprint)
        meta_path = self.dir / "embeddings" / f"{key}.json"
        blob_path = self.dir / "embeddings" / f"{key}.f32"
        if not (meta_path.is_file() and blob_path.is_file()):
            return None
        meta = json.loads(meta_path.read_text())
        if meta.get("schema_version", 0) > EMBEDDING_SCHEMA_VERSION:
            raise StoreError(f"embedding cache schema too new at {meta_path}")
        raw = np.frombuffer(blob_path.read_bytes(), dtype="<f4")
        embeddings = raw.reshape(meta["count"], meta["dim"]).copy()
        return FrameEmbeddingSeries(
            embeddings=embeddings,
            timestamps=np.asarray(meta["timestamps"], dtype=np.float64),
            video_hash=meta["video_hash"],
            sampling_rate=float(meta["sampling_rate"]),
            backend_fingerprint=meta["backend_fingerprint"],
        )

    # -- priors and scores ------------------------------------------------

    def save_prior(self, profile, prior_id: str) -> Path:
        path = self.dir / "priors" / f"{prior_id}.json"
        atomic_write_json(path, profile.to_json())
        return path

    def load_prior(self, prior_id: str):
        from .prior import PriorProfile

        path = self.dir / "priors" / f"{prior_id}.json"
        if not path.is_file():
            raise StoreError(f"unknown prior id: {prior_id}")
        return PriorProfile.from_json(json.loads(path.read_text()))

    def save_scores(self, series, series_id: str) -> Path:
        path = self.dir / "scores" / f"{series_id}.json"
        atomic_write_json(path, series.to_json())
        return path

    def load_scores(self, series_id: str):
        from .score import ScoreSeries

        path = self.dir / "scores" / f"{series_id}.json"
        if not path.is_file():
            raise StoreError(f"unknown score series id: {series_id}")
        return ScoreSeries.from_json(json.loads(path.read_text()))

    def has_scores(self, series_id: str) -> bool:
        return (self.dir / "scores" / f"{series_id}.json").is_file()

    def export_path(self, name: str) -> Path:
        return self.dir / "exports" / name
