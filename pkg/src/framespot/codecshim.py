"""Fallback media decoder/encoder speaking the ffmpeg CLI subset this
package emits. Used automatically when no ffmpeg binary is available;
any real FFmpeg-compatible tool is preferred when present.

Supported invocation shapes:

    <shim> -hide_banner -i IN                                      (probe banner)
    <shim> ... -i IN -vf fps=R[,scale=W:H] -f rawvideo -pix_fmt rgb24 -
    <shim> ... -ss T -i IN -frames:v 1 -vf scale=W:H -f image2pipe -c:v mjpeg -
    <shim> ... -y -ss A -i IN -t D (-c copy | -c:v CODEC ...) OUT.mp4
    <shim> ... -y -f concat -safe 0 -i LIST.txt (-c copy | -c:v CODEC) OUT.mp4
    <shim> -hide_banner -encoders

``-c copy`` re-encodes internally (OpenCV cannot stream-copy); output
still lands within the caller's duration tolerance. Only the video
stream is handled; audio options are accepted and ignored.
"""

from __future__ import annotations

import sys
from pathlib import Path

_VALUE_FLAGS = {
    "-i", "-ss", "-t", "-vf", "-f", "-pix_fmt", "-frames:v",
    "-c", "-c:v", "-c:a", "-q:v", "-loglevel", "-safe",
}
_BOOL_FLAGS = {"-hide_banner", "-y", "-encoders", "-an"}


def _fail(message: str) -> int:
    sys.stderr.write(message + "\n")
    return 1


def _parse_args(argv: list[str]) -> tuple[dict, str | None]:
    opts: dict = {}
    output = None
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS:
            if i + 1 >= len(argv):
                raise ValueError(f"missing value for {tok}")
            opts[tok] = argv[i + 1]
            i += 2
        elif tok in _BOOL_FLAGS:
            opts[tok] = True
            i += 1
        elif tok.startswith("-") and tok != "-":
            raise ValueError(f"unsupported option: {tok}")
        else:
            output = tok
            i += 1
    return opts, output


def _parse_vf(vf: str | None) -> tuple[float | None, tuple[int, int] | None]:
    fps = None
    scale = None
    if vf:
        for part in vf.split(","):
            part = part.strip()
            if part.startswith("fps="):
                fps = float(part[4:])
            elif part.startswith("scale="):
                w, h = part[6:].split(":")
                scale = (int(w), int(h))
            elif part:
                raise ValueError(f"unsupported filter: {part}")
    return fps, scale


def _fourcc_name(cap) -> str:
    import cv2

    raw = int(cap.get(cv2.CAP_PROP_FOURCC))
    if raw <= 0:
        return "unknown"
    name = "".join(chr((raw >> (8 * k)) & 0xFF) for k in range(4)).strip()
    return name if name.isprintable() and name else "unknown"


def _open(path: str):
    import cv2

    if not Path(path).is_file():
        raise ValueError(f"{path}: No such file or directory")
    cap = cv2.VideoCapture(path)
    fps = cap.get(cv2.CAP_PROP_FPS)
    count = cap.get(cv2.CAP_PROP_FRAME_COUNT)
    width = int(cap.get(cv2.CAP_PROP_FRAME_WIDTH))
    height = int(cap.get(cv2.CAP_PROP_FRAME_HEIGHT))
    if not cap.isOpened() or fps <= 0 or count <= 0 or width <= 0 or height <= 0:
        cap.release()
        raise ValueError(f"{path}: Invalid data found when processing input")
    return cap, fps, int(count), width, height


def _print_banner(path: str) -> None:
    cap, fps, count, width, height = _open(path)
    codec = _fourcc_name(cap)
    cap.release()
    duration = count / fps
    hh = int(duration // 3600)
    mm = int(duration % 3600 // 60)
    ss = duration % 60
    ext = Path(path).suffix.lstrip(".") or "unknown"
    sys.stderr.write(
        f"Input #0, {ext}, from '{path}':\n"
        f"  Duration: {hh:02d}:{mm:02d}:{ss:05.2f}, start: 0.000000, bitrate: N/A\n"
        f"  Stream #0:0: Video: {codec}, yuv420p, {width}x{height}, "
        f"{fps:g} fps, {fps:g} tbr\n"
    )


def _iter_frames(cap, start_idx: int, end_idx: int):
    """Yield (source_index, BGR frame) for indices [start_idx, end_idx)."""
    import cv2

    if start_idx > 0:
        cap.set(cv2.CAP_PROP_POS_FRAMES, start_idx)
    idx = start_idx
    while idx < end_idx:
        ok, frame = cap.read()
        if not ok:
            break
        yield idx, frame
        idx += 1


def _resample_indices(count: int, native_fps: float, out_fps: float):
    """Source index for each output frame at t=i/out_fps (may repeat)."""
    i = 0
    while True:
        j = int(i * native_fps / out_fps + 0.5)
        if j >= count:
            return
        yield j
        i += 1


def _write_rawvideo(opts: dict) -> int:
    import cv2

    cap, fps, count, width, height = _open(opts["-i"])
    out_fps, scale = _parse_vf(opts.get("-vf"))
    out_fps = out_fps or fps
    stream = sys.stdout.buffer
    targets = _resample_indices(count, fps, out_fps)
    try:
        pending = next(targets, None)
        for idx, frame in _iter_frames(cap, 0, count):
            while pending is not None and pending == idx:
                img = frame
                if scale:
                    img = cv2.resize(img, scale, interpolation=cv2.INTER_AREA)
                stream.write(cv2.cvtColor(img, cv2.COLOR_BGR2RGB).tobytes())
                pending = next(targets, None)
            if pending is None:
                break
        stream.flush()
    except BrokenPipeError:
        return 1
    finally:
        cap.release()
    return 0


def _write_jpeg(opts: dict) -> int:
    import cv2

    cap, fps, count, width, height = _open(opts["-i"])
    seek = float(opts.get("-ss", 0.0))
    idx = min(max(0, int(seek * fps + 0.5)), count - 1)
    _, scale = _parse_vf(opts.get("-vf"))
    try:
        frame = None
        for _, frame in _iter_frames(cap, idx, idx + 1):
            pass
        if frame is None:
            return _fail("Output file is empty, nothing was encoded")
        if scale:
            frame = cv2.resize(frame, scale, interpolation=cv2.INTER_AREA)
        ok, buf = cv2.imencode(".jpg", frame, [cv2.IMWRITE_JPEG_QUALITY, 90])
        if not ok:
            return _fail("jpeg encode failed")
        sys.stdout.buffer.write(buf.tobytes())
        sys.stdout.buffer.flush()
    finally:
        cap.release()
    return 0


def _open_writer(path: str, fps: float, size: tuple[int, int]):
    import cv2

    writer = cv2.VideoWriter(path, cv2.VideoWriter_fourcc(*"mp4v"), fps, size)
    if not writer.isOpened():
        raise ValueError(f"cannot open output for writing: {path}")
    return writer


def _write_cut(opts: dict, output: str) -> int:
    import cv2

    cap, fps, count, width, height = _open(opts["-i"])
    start = float(opts.get("-ss", 0.0))
    start_idx = min(int(start * fps + 0.5), count)
    if "-t" in opts:
        end_idx = min(start_idx + int(round(float(opts["-t"]) * fps)), count)
    else:
        end_idx = count
    _, scale = _parse_vf(opts.get("-vf"))
    size = scale or (width, height)
    writer = _open_writer(output, fps, size)
    wrote = 0
    try:
        for _, frame in _iter_frames(cap, start_idx, end_idx):
            if scale:
                frame = cv2.resize(frame, scale, interpolation=cv2.INTER_AREA)
            writer.write(frame)
            wrote += 1
    finally:
        cap.release()
        writer.release()
    if wrote == 0:
        Path(output).unlink(missing_ok=True)
        return _fail("Output file is empty, nothing was encoded")
    return 0


def _write_concat(opts: dict, output: str) -> int:
    import cv2

    list_path = Path(opts["-i"])
    if not list_path.is_file():
        return _fail(f"{list_path}: No such file or directory")
    clips = []
    for line in list_path.read_text().splitlines():
        line = line.strip()
        if line.startswith("file "):
            raw = line[5:].strip()
            if raw.startswith("'") and raw.endswith("'"):
                raw = raw[1:-1].replace(r"'\''", "'")
            clips.append(raw)
    if not clips:
        return _fail("concat list contains no files")
    writer = None
    size = None
    try:
        for clip in clips:
            cap, fps, count, width, height = _open(clip)
            if writer is None:
                size = (width, height)
                writer = _open_writer(output, fps, size)
            for _, frame in _iter_frames(cap, 0, count):
                if (frame.shape[1], frame.shape[0]) != size:
                    frame = cv2.resize(frame, size, interpolation=cv2.INTER_AREA)
                writer.write(frame)
            cap.release()
    finally:
        if writer is not None:
            writer.release()
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        opts, output = _parse_args(argv)
    except ValueError as exc:
        return _fail(str(exc))

    if opts.get("-encoders"):
        sys.stdout.write("Encoders:\n V..... mpeg4  MPEG-4 part 2 (OpenCV fallback)\n")
        return 0
    if "-i" not in opts:
        return _fail("At least one input file must be specified")

    try:
        if output is None:
            _print_banner(opts["-i"])
            sys.stderr.write("At least one output file must be specified\n")
            return 1
        if opts.get("-f") == "concat":
            return _write_concat(opts, output)
        if output == "-":
            if opts.get("-f") == "rawvideo":
                return _write_rawvideo(opts)
            if opts.get("-f") == "image2pipe":
                return _write_jpeg(opts)
            return _fail(f"unsupported piped output format: {opts.get('-f')}")
        return _write_cut(opts, output)
    except ValueError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
