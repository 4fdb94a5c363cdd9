import os
import sys
from pathlib import Path

import cv2
import numpy as np
import pytest

from framespot.embedding import BackendSpec, EmbeddingBackend, StubBackend, build_demo_model, load_backend
from framespot.score import ScoreSeries

FIXTURE_W, FIXTURE_H = 160, 128
FIXTURE_FPS = 10


def image_x() -> np.ndarray:
    """Bright circles on dark gray; the 'highlight' content."""
    img = np.full((FIXTURE_H, FIXTURE_W, 3), 30, np.uint8)
    yy, xx = np.mgrid[0:FIXTURE_H, 0:FIXTURE_W]
    for cx, cy, r, col in [
        (40, 40, 25, (240, 200, 40)),
        (110, 80, 30, (60, 220, 220)),
        (80, 30, 15, (250, 80, 150)),
    ]:
        img[(xx - cx) ** 2 + (yy - cy) ** 2 < r**2] = col
    return img


def image_y() -> np.ndarray:
    """Green checkerboard; visually distinct filler content."""
    img = np.zeros((FIXTURE_H, FIXTURE_W, 3), np.uint8)
    tile = ((np.indices((FIXTURE_H // 8, FIXTURE_W // 8)).sum(axis=0) % 2) * 255).astype(np.uint8)
    img[:, :, 1] = np.kron(tile, np.ones((8, 8), np.uint8))[:FIXTURE_H, :FIXTURE_W]
    img[:, :, 2] = 60
    return img


def near_duplicate(img: np.ndarray, k: int) -> np.ndarray:
    """Pixel noise plus a small brightness shift, seeded by k."""
    rng = np.random.default_rng(1000 + k)
    noisy = img.astype(np.int16) + rng.integers(-10, 10, img.shape) + int(rng.integers(-6, 6))
    return np.clip(noisy, 0, 255).astype(np.uint8)


def write_video(path, segments, fps=FIXTURE_FPS):
    """Write [(rgb_image, seconds), ...] as an mp4 at the given fps."""
    first = segments[0][0]
    h, w = first.shape[:2]
    writer = cv2.VideoWriter(str(path), cv2.VideoWriter_fourcc(*"mp4v"), fps, (w, h))
    assert writer.isOpened()
    for img, seconds in segments:
        bgr = cv2.cvtColor(img, cv2.COLOR_RGB2BGR)
        for _ in range(round(seconds * fps)):
            writer.write(bgr)
    writer.release()
    return Path(path)


class VectorBackend(EmbeddingBackend):
    """Test backend with explicit vectors.

    Texts map through ``text_map``; images map through ``image_fn`` or,
    by default, by using pixel [0,0,0] as a basis-vector index.
    """

    def __init__(self, dim, text_map=None, image_fn=None, fingerprint=None):
        self.dim = dim
        self.fingerprint = fingerprint or f"vector:{dim}"
        self.text_map = text_map or {}
        self.image_fn = image_fn

    def _encode_image(self, image):
        if self.image_fn is not None:
            return np.asarray(self.image_fn(image), dtype=np.float32)
        return basis(self.dim, int(np.asarray(image)[0, 0, 0]) % self.dim)

    def _encode_text(self, text):
        return np.asarray(self.text_map[text], dtype=np.float32)


def basis(dim: int, idx: int) -> np.ndarray:
    vec = np.zeros(dim, dtype=np.float32)
    vec[idx] = 1.0
    return vec


def basis_image(idx: int, size: int = 4) -> np.ndarray:
    """1-channel-coded image that VectorBackend maps to basis vector idx."""
    img = np.zeros((size, size, 3), np.uint8)
    img[:, :, 0] = idx
    return img


def series_from(normalized, rate=1.0, raw=None, video_hash="testhash", fingerprint="vector:8"):
    normalized = np.asarray(normalized, dtype=np.float64)
    return ScoreSeries(
        raw=np.asarray(raw, dtype=np.float64) if raw is not None else normalized.copy(),
        normalized=normalized,
        timestamps=np.arange(len(normalized), dtype=np.float64) / rate,
        provenance={"kind": "text", "prompt": "test"},
        sampling_rate=rate,
        video_hash=video_hash,
        backend_fingerprint=fingerprint,
    )


@pytest.fixture
def stub_backend():
    return StubBackend(dim=32)


@pytest.fixture(scope="session")
def demo_model_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("model") / "demo.pt"
    return build_demo_model(str(path), dim=128, input_resolution=64, seed=0)


@pytest.fixture(scope="session")
def ts_backend(demo_model_path):
    return load_backend(BackendSpec(model_path=demo_model_path, dim=128, input_resolution=64))


@pytest.fixture(scope="session")
def fixture_video(tmp_path_factory):
    """60 s video: filler Y everywhere except X during [20, 30) s."""
    path = tmp_path_factory.mktemp("video") / "fixture.mp4"
    x, y = image_x(), image_y()
    return write_video(path, [(y, 20), (x, 10), (y, 30)])


@pytest.fixture(scope="session")
def short_video(tmp_path_factory):
    """12 s single-pattern video for fast media tests."""
    path = tmp_path_factory.mktemp("video") / "short.mp4"
    return write_video(path, [(image_y(), 12)])


@pytest.fixture(scope="session")
def photo_library(tmp_path_factory):
    """Photo library: keyword subfolders with 10 near-duplicates each."""
    root = tmp_path_factory.mktemp("photos")
    from PIL import Image

    for keyword, base in (("circles", image_x()), ("checkers", image_y())):
        sub = root / keyword
        sub.mkdir()
        for k in range(10):
            Image.fromarray(near_duplicate(base, k)).save(sub / f"photo{k:02d}.png")
    return root


@pytest.fixture(scope="session")
def x_photo_dir(photo_library):
    return photo_library / "circles"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = []
    for outcome in ("passed", "failed", "error", "skipped"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance" in rep.nodeid and getattr(rep, "when", "call") == "call":
                rows.append((rep.nodeid.split("::")[-1], outcome.upper()))
    if rows:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, outcome in rows:
            mark = "PASS" if outcome == "PASSED" else outcome
            terminalreporter.write_line(f"[ACCEPTANCE] {name}: {mark}")
