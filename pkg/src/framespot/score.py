"""Per-frame highlight scoring.

A raw score is the dot product between a prior's mean embedding and a
frame embedding; since frame embeddings are unit-normalized this is the
cosine similarity scaled by the prior mean's norm, and the subsequent
per-video min-max normalization cancels any positive rescaling. The
text-prompt path scores frames against a single text embedding and
produces series interchangeable with the prior path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embedding.backend import UNIT_NORM_TOL, EmbeddingBackend

SCORE_SCHEMA_VERSION = 1


@dataclass
class FrameEmbeddingSeries:
    """Unit-norm embeddings of frames sampled at a fixed rate.

    Row i of ``embeddings`` belongs to frame index i at ``timestamps[i]``
    seconds; timestamps are strictly increasing.
    """

    embeddings: np.ndarray  # (N, D) float32, rows unit-norm
    timestamps: np.ndarray  # (N,) float64 seconds
    video_hash: str
    sampling_rate: float
    backend_fingerprint: str

    def __post_init__(self):
        self.embeddings = np.asarray(self.embeddings, dtype=np.float32)
        self.timestamps = np.asarray(self.timestamps, dtype=np.float64)
        if self.embeddings.ndim != 2 or self.embeddings.shape[0] == 0:
            raise ValueError(f"embeddings must be a non-empty (N, D) array, got {self.embeddings.shape}")
        if self.timestamps.shape != (self.embeddings.shape[0],):
            raise ValueError("one timestamp required per embedding row")
        if np.any(np.diff(self.timestamps) <= 0):
            raise ValueError("timestamps must be strictly increasing")
        norms = np.linalg.norm(self.embeddings.astype(np.float64), axis=1)
        bad = np.nonzero(np.abs(norms - 1.0) > UNIT_NORM_TOL)[0]
        if bad.size:
            raise ValueError(f"frame embeddings not unit-norm at indices {bad[:5].tolist()}")

    def __len__(self) -> int:
        return self.embeddings.shape[0]

    @property
    def dim(self) -> int:
        return self.embeddings.shape[1]


@dataclass
class ScoreSeries:
    """Raw and [0,1]-normalized highlight scores for sampled frames."""

    raw: np.ndarray
    normalized: np.ndarray
    timestamps: np.ndarray
    provenance: dict  # {"kind": "prior", "prior_id": ...} or {"kind": "text", "prompt": ...}
    sampling_rate: float
    video_hash: str
    backend_fingerprint: str = ""
    smoothing: dict | None = None  # {"window": odd int} when applied
    schema_version: int = SCORE_SCHEMA_VERSION
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.raw = np.asarray(self.raw, dtype=np.float64)
        self.normalized = np.asarray(self.normalized, dtype=np.float64)
        self.timestamps = np.asarray(self.timestamps, dtype=np.float64)
        if not (len(self.raw) == len(self.normalized) == len(self.timestamps)):
            raise ValueError("raw, normalized, and timestamps must have equal length")
        if len(self.raw) == 0:
            raise ValueError("empty score series")
        if np.any(self.normalized < -1e-12) or np.any(self.normalized > 1 + 1e-12):
            raise ValueError("normalized scores must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.raw)

    @property
    def duration(self) -> float:
        """Span covered by the sampled frames, to the end of the last one."""
        return float(self.timestamps[-1]) + 1.0 / self.sampling_rate

    def to_json(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "video_hash": self.video_hash,
            "sampling_rate": self.sampling_rate,
            "backend_fingerprint": self.backend_fingerprint,
            "provenance": self.provenance,
            "smoothing": self.smoothing,
            "timestamps": [float(t) for t in self.timestamps],
            "raw": [float(x) for x in self.raw],
            "normalized": [float(x) for x in self.normalized],
            "extra": self.extra,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ScoreSeries":
        version = data.get("schema_version", 0)
        if version > SCORE_SCHEMA_VERSION:
            raise ValueError(f"score file schema version {version} not supported")
        return cls(
            raw=np.asarray(data["raw"], dtype=np.float64),
            normalized=np.asarray(data["normalized"], dtype=np.float64),
            timestamps=np.asarray(data["timestamps"], dtype=np.float64),
            provenance=data["provenance"],
            sampling_rate=float(data["sampling_rate"]),
            video_hash=data.get("video_hash", ""),
            backend_fingerprint=data.get("backend_fingerprint", ""),
            smoothing=data.get("smoothing"),
            schema_version=version,
            extra=data.get("extra", {}),
        )


def score_frames(prior, frames: FrameEmbeddingSeries) -> np.ndarray:
    """Raw scores: dot product of the prior mean with each frame embedding."""
    mean = np.asarray(prior.mean_embedding, dtype=np.float64)
    if mean.shape != (frames.dim,):
        raise ValueError(
            f"prior dim {mean.shape} does not match frame dim {frames.dim}"
        )
    if prior.backend_fingerprint != frames.backend_fingerprint:
        raise ValueError(
            "backend fingerprint mismatch: prior "
            f"{prior.backend_fingerprint!r} vs frames {frames.backend_fingerprint!r}"
        )
    return frames.embeddings.astype(np.float64) @ mean


def score_frames_text(prompt: str, frames: FrameEmbeddingSeries,
                      backend: EmbeddingBackend) -> np.ndarray:
    """Baseline raw scores: dot product of a text embedding with each frame."""
    if not prompt or not prompt.strip():
        raise ValueError("empty text prompt")
    if backend.fingerprint != frames.backend_fingerprint:
        raise ValueError(
            "backend fingerprint mismatch: text backend "
            f"{backend.fingerprint!r} vs frames {frames.backend_fingerprint!r}"
        )
    text_vec = backend.encode_text(prompt).astype(np.float64)
    return frames.embeddings.astype(np.float64) @ text_vec


def normalize_scores(raw: np.ndarray) -> np.ndarray:
    """Min-max normalize to [0,1]; a constant series maps to all 0.5."""
    arr = np.asarray(raw, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("cannot normalize an empty score array")
    if not np.all(np.isfinite(arr)):
        raise ValueError("scores contain non-finite values")
    lo, hi = float(arr.min()), float(arr.max())
    if hi == lo:
        return np.full_like(arr, 0.5)
    return (arr - lo) / (hi - lo)


def smooth_scores(scores: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average; windows truncate at the edges.

    ``window`` must be odd, >= 1, and <= len(scores); window == 1 is the
    identity.
    """
    arr = np.asarray(scores, dtype=np.float64)
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be odd and >= 1, got {window}")
    if window > arr.size:
        raise ValueError(f"window {window} longer than series of {arr.size}")
    if window == 1:
        return arr.copy()
    half = window // 2
    out = np.empty_like(arr)
    # prefix sums with a leading zero give O(1) truncated-window sums
    prefix = np.concatenate(([0.0], np.cumsum(arr)))
    n = arr.size
    for i in range(n):
        lo = max(0, i - half)
        hi = min(n, i + half + 1)
        out[i] = (prefix[hi] - prefix[lo]) / (hi - lo)
    return out


def build_score_series(
    raw: np.ndarray,
    frames: FrameEmbeddingSeries,
    provenance: dict,
    smooth_window: int | None = None,
) -> ScoreSeries:
    """Assemble a ScoreSeries; smoothing (when requested) is applied to the
    raw scores before normalization so the stored pair stays order-consistent."""
    raw = np.asarray(raw, dtype=np.float64)
    smoothing = None
    if smooth_window is not None and smooth_window != 1:
        raw = smooth_scores(raw, smooth_window)
        smoothing = {"window": int(smooth_window)}
    return ScoreSeries(
        raw=raw,
        normalized=normalize_scores(raw),
        timestamps=frames.timestamps.copy(),
        provenance=provenance,
        sampling_rate=frames.sampling_rate,
        video_hash=frames.video_hash,
        backend_fingerprint=frames.backend_fingerprint,
        smoothing=smoothing,
    )
