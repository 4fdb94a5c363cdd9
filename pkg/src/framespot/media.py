"""Video probing, frame sampling, thumbnails, and clip cutting.

All decoding and encoding is delegated to an external FFmpeg-compatible
command-line tool. The binary is resolved from (in order) an explicit
argument, the FRAMESPOT_FFMPEG environment variable, ``ffmpeg`` on PATH,
and finally the bundled OpenCV-backed fallback (``framespot-codec``),
which speaks the same argument subset. Raw frames cross a pipe as
packed rgb24.
"""

from __future__ import annotations

import math
import os
import re
import shutil
import subprocess
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import MediaError
from .store import file_sha256

_invocation_count = 0


def decoder_invocations() -> int:
    """Number of decoder processes spawned since the last reset."""
    return _invocation_count


def reset_decoder_invocations() -> None:
    global _invocation_count
    _invocation_count = 0


def resolve_decoder(decoder: str | None = None) -> list[str]:
    """Resolve the decoder binary into an argv prefix."""
    candidate = decoder or os.environ.get("FRAMESPOT_FFMPEG")
    if candidate:
        return [candidate]
    found = shutil.which("ffmpeg")
    if found:
        return [found]
    return [sys.executable, "-m", "framespot.codecshim"]


def _spawn(argv: list[str], **kwargs) -> subprocess.Popen:
    global _invocation_count
    _invocation_count += 1
    try:
        return subprocess.Popen(argv, **kwargs)
    except OSError as exc:
        raise MediaError(f"failed to spawn decoder {argv[0]}: {exc}") from exc


def _run(argv: list[str], timeout: float = 600.0) -> subprocess.CompletedProcess:
    proc = _spawn(argv, stdout=subprocess.PIPE, stderr=subprocess.PIPE)
    try:
        out, err = proc.communicate(timeout=timeout)
    except subprocess.TimeoutExpired:
        proc.kill()
        raise MediaError(f"decoder timed out: {' '.join(argv)}")
    return subprocess.CompletedProcess(argv, proc.returncode, out, err)


@dataclass(frozen=True)
class MediaInfo:
    duration: float
    native_fps: float
    width: int
    height: int
    container: str = ""
    codec: str = ""

    @property
    def frame_period(self) -> float:
        return 1.0 / self.native_fps


@dataclass
class SampledFrame:
    index: int
    timestamp: float
    image: np.ndarray  # HxWx3 uint8 RGB


@dataclass(frozen=True)
class Interval:
    start: float
    end: float

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid interval [{self.start}, {self.end})")

    @property
    def length(self) -> float:
        return self.end - self.start

    def validate_against(self, duration: float) -> None:
        if self.end > duration + 1e-6:
            raise ValueError(
                f"interval [{self.start}, {self.end}) exceeds video duration {duration}"
            )

    def overlaps(self, other: "Interval") -> bool:
        return self.start < other.end and other.start < self.end


_DURATION_RE = re.compile(r"Duration:\s*(\d+):(\d+):(\d+(?:\.\d+)?)")
_VIDEO_RE = re.compile(r"Video:\s*(\w+)")
_SIZE_RE = re.compile(r"[\s,](\d{2,5})x(\d{2,5})[\s,\[]")
_FPS_RE = re.compile(r"(\d+(?:\.\d+)?)\s*fps")
_TBR_RE = re.compile(r"(\d+(?:\.\d+)?)\s*tbr")
_INPUT_RE = re.compile(r"Input #\d+,\s*([^,]+(?:,[^,]+)*?),\s*from")


def probe(video_path: str | os.PathLike, decoder: str | None = None) -> MediaInfo:
    """Inspect a video by parsing the decoder's input banner."""
    path = Path(video_path)
    if not path.is_file():
        raise MediaError(f"video file not found: {path}")
    argv = resolve_decoder(decoder) + ["-hide_banner", "-i", str(path)]
    result = _run(argv)
    banner = result.stderr.decode("utf-8", errors="replace")

    m = _DURATION_RE.search(banner)
    video_line = next((ln for ln in banner.splitlines() if "Video:" in ln), None)
    if m is None or video_line is None:
        tail = banner.strip().splitlines()[-1] if banner.strip() else "no decoder output"
        raise MediaError(f"cannot probe {path}: {tail}")
    duration = int(m.group(1)) * 3600 + int(m.group(2)) * 60 + float(m.group(3))
    if duration <= 0:
        raise MediaError(f"cannot probe {path}: zero duration reported")

    size = _SIZE_RE.search(video_line)
    fps = _FPS_RE.search(video_line) or _TBR_RE.search(video_line)
    codec = _VIDEO_RE.search(video_line)
    if size is None or fps is None:
        raise MediaError(f"cannot parse video stream line: {video_line.strip()}")
    container = _INPUT_RE.search(banner)
    return MediaInfo(
        duration=duration,
        native_fps=float(fps.group(1)),
        width=int(size.group(1)),
        height=int(size.group(2)),
        container=container.group(1).strip() if container else "",
        codec=codec.group(1) if codec else "",
    )


def _fit_within(width: int, height: int, max_edge: int) -> tuple[int, int]:
    longest = max(width, height)
    if longest <= max_edge:
        return width, height
    scale = max_edge / longest
    return max(1, round(width * scale)), max(1, round(height * scale))


def sample_frames(
    video_path: str | os.PathLike,
    rate: float,
    decoder: str | None = None,
    max_edge: int | None = None,
    info: MediaInfo | None = None,
) -> Iterator[SampledFrame]:
    """Stream frames sampled at ``rate`` fps with timestamps i/rate.

    A decode failure mid-stream raises MediaError carrying the last good
    timestamp, after the frames read so far have been yielded.
    """
    if rate <= 0:
        raise ValueError(f"sampling rate must be positive, got {rate}")
    info = info or probe(video_path, decoder)
    if rate > info.native_fps + 1e-9:
        raise ValueError(
            f"sampling rate {rate} exceeds native fps {info.native_fps}"
        )
    w, h = (info.width, info.height)
    vf = f"fps={rate:g}"
    if max_edge is not None:
        w, h = _fit_within(w, h, max_edge)
        vf += f",scale={w}:{h}"
    argv = resolve_decoder(decoder) + [
        "-hide_banner", "-loglevel", "error",
        "-i", str(video_path),
        "-vf", vf,
        "-f", "rawvideo", "-pix_fmt", "rgb24", "-",
    ]
    frame_bytes = w * h * 3
    proc = _spawn(argv, stdout=subprocess.PIPE, stderr=subprocess.PIPE)
    index = 0
    last_good: float | None = None
    try:
        while True:
            chunk = proc.stdout.read(frame_bytes)
            if not chunk:
                break
            if len(chunk) < frame_bytes:
                # pipe may return short reads; top it up
                rest = proc.stdout.read(frame_bytes - len(chunk))
                chunk += rest or b""
            if len(chunk) < frame_bytes:
                proc.wait()
                raise MediaError(
                    f"decoder emitted a truncated frame at index {index}",
                    last_good_timestamp=last_good,
                )
            image = np.frombuffer(chunk, dtype=np.uint8).reshape(h, w, 3)
            timestamp = index / rate
            yield SampledFrame(index=index, timestamp=timestamp, image=image.copy())
            last_good = timestamp
            index += 1
        proc.wait()
        if proc.returncode != 0:
            err = proc.stderr.read().decode("utf-8", errors="replace").strip()
            raise MediaError(
                f"decoder failed after {index} frames: {err.splitlines()[-1] if err else proc.returncode}",
                last_good_timestamp=last_good,
            )
        if index == 0:
            raise MediaError(f"no frames decoded from {video_path}")
    finally:
        if proc.poll() is None:
            proc.kill()
            proc.wait()


def extract_thumbnail(
    video_path: str | os.PathLike,
    timestamp: float,
    max_edge: int = 320,
    decoder: str | None = None,
    cache_dir: str | os.PathLike | None = None,
    info: MediaInfo | None = None,
) -> bytes:
    """JPEG bytes of the frame nearest ``timestamp``, longest edge <= max_edge."""
    cache_path = None
    if cache_dir is not None:
        # a hit implies the timestamp validated when first cached
        bucket = round(timestamp * 10)  # 0.1 s buckets
        key = f"{file_sha256(video_path)[:16]}-{bucket}-{max_edge}.jpg"
        cache_path = Path(cache_dir) / key
        if cache_path.is_file():
            return cache_path.read_bytes()
    info = info or probe(video_path, decoder)
    if not (0 <= timestamp <= info.duration + 1e-9):
        raise ValueError(
            f"timestamp {timestamp} outside [0, {info.duration}]"
        )

    # seeking at exactly EOF yields nothing; back off half a frame period
    seek = min(timestamp, max(0.0, info.duration - 0.75 * info.frame_period))
    w, h = _fit_within(info.width, info.height, max_edge)
    argv = resolve_decoder(decoder) + [
        "-hide_banner", "-loglevel", "error",
        "-ss", f"{seek:.6f}",
        "-i", str(video_path),
        "-frames:v", "1",
        "-vf", f"scale={w}:{h}",
        "-f", "image2pipe", "-c:v", "mjpeg", "-",
    ]
    result = _run(argv)
    if result.returncode != 0 or not result.stdout:
        err = result.stderr.decode("utf-8", errors="replace").strip()
        raise MediaError(f"thumbnail extraction failed at t={timestamp}: {err[-200:]}")
    if cache_path is not None:
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        cache_path.write_bytes(result.stdout)
    return result.stdout


_encoder_cache: dict[str, str] = {}


def _default_codec(decoder_argv: list[str]) -> str:
    key = " ".join(decoder_argv)
    if key not in _encoder_cache:
        try:
            result = _run(decoder_argv + ["-hide_banner", "-encoders"], timeout=30)
            listing = result.stdout.decode("utf-8", errors="replace")
        except MediaError:
            listing = ""
        _encoder_cache[key] = "libx264" if " libx264 " in listing else "mpeg4"
    return _encoder_cache[key]


def cut_clip(
    video_path: str | os.PathLike,
    interval: Interval,
    out_path: str | os.PathLike,
    decoder: str | None = None,
    info: MediaInfo | None = None,
) -> Path:
    """Cut ``interval`` into ``out_path``.

    Tries a stream copy first and falls back to re-encoding whenever the
    copied result misses the requested duration by more than two native
    frame periods (keyframe-aligned copies are not always possible).
    """
    info = info or probe(video_path, decoder)
    interval.validate_against(info.duration)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    dec = resolve_decoder(decoder)
    tolerance = 2.0 * info.frame_period
    base = dec + [
        "-hide_banner", "-loglevel", "error", "-y",
        "-ss", f"{interval.start:.6f}",
        "-i", str(video_path),
        "-t", f"{interval.length:.6f}",
    ]

    result = _run(base + ["-c", "copy", str(out)])
    if result.returncode == 0 and out.is_file():
        try:
            got = probe(out, decoder).duration
            if abs(got - interval.length) <= tolerance:
                return out
        except MediaError:
            pass

    codec = _default_codec(dec)
    result = _run(base + ["-c:v", codec, "-q:v", "2", "-c:a", "copy", str(out)])
    if result.returncode != 0 or not out.is_file():
        err = result.stderr.decode("utf-8", errors="replace").strip()
        raise MediaError(f"clip encode failed: {err[-300:]}")
    return out


def concat_clips(
    clip_paths: list[str | os.PathLike],
    out_path: str | os.PathLike,
    decoder: str | None = None,
) -> Path:
    """Concatenate clips (same stream layout) into one file."""
    if not clip_paths:
        raise ValueError("no clips to concatenate")
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    dec = resolve_decoder(decoder)
    with tempfile.NamedTemporaryFile(
        "w", suffix=".txt", delete=False, dir=out.parent
    ) as f:
        for p in clip_paths:
            escaped = str(Path(p).resolve()).replace("'", r"'\''")
            f.write(f"file '{escaped}'\n")
        list_path = f.name
    try:
        base = dec + [
            "-hide_banner", "-loglevel", "error", "-y",
            "-f", "concat", "-safe", "0", "-i", list_path,
        ]
        result = _run(base + ["-c", "copy", str(out)])
        if result.returncode != 0 or not out.is_file():
            result = _run(base + ["-c:v", _default_codec(dec), "-q:v", "2", str(out)])
        if result.returncode != 0 or not out.is_file():
            err = result.stderr.decode("utf-8", errors="replace").strip()
            raise MediaError(f"concat failed: {err[-300:]}")
        return out
    finally:
        os.unlink(list_path)


def expected_sample_count(duration: float, rate: float) -> int:
    return math.floor(duration * rate)
