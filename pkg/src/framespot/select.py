"""Highlight selection over a score series.

``best_window`` finds the fixed-length window with the maximum sum of
normalized scores (ties go to the earliest start). ``top_peaks`` picks
multiple non-overlapping peak windows by greedy non-maximum suppression
for montages. Selection operates on normalized scores; as min-max
normalization is a strictly increasing affine map wherever it is not
degenerate, the chosen windows agree with selection on raw scores.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import media
from .media import Interval
from .score import ScoreSeries


@dataclass
class HighlightResult:
    interval: Interval
    mean_score: float
    sum_score: float
    rank: int  # 1-based score order
    peak_time: float | None = None  # NMS peak center, when picked by top_peaks

    def to_json(self) -> dict:
        return {
            "interval": {"start": self.interval.start, "end": self.interval.end},
            "mean_score": self.mean_score,
            "sum_score": self.sum_score,
            "rank": self.rank,
            "peak_time": self.peak_time,
        }


def _window_frames(series: ScoreSeries, length_seconds: float) -> int:
    if length_seconds <= 0:
        raise ValueError(f"window length must be positive, got {length_seconds}")
    w = round(length_seconds * series.sampling_rate)
    if w < 1:
        raise ValueError(
            f"window of {length_seconds}s covers no sampled frame at "
            f"{series.sampling_rate} fps"
        )
    if w > len(series):
        raise ValueError(
            f"window of {w} frames exceeds series length {len(series)}"
        )
    return w


def best_window(series: ScoreSeries, length_seconds: float) -> HighlightResult:
    """The window of round(length x rate) frames with maximal score sum."""
    w = _window_frames(series, length_seconds)
    scores = series.normalized
    # per-window explicit sums, not prefix-sum differences: identical window
    # contents must produce bit-identical sums or the earliest-start
    # tie-break misfires on float rounding
    sums = np.lib.stride_tricks.sliding_window_view(scores, w).sum(axis=1)
    start = int(np.argmax(sums))  # argmax returns the first max: earliest window
    total = float(sums[start])
    interval = Interval(
        start=float(series.timestamps[start]),
        end=float(series.timestamps[start + w - 1]) + 1.0 / series.sampling_rate,
    )
    return HighlightResult(
        interval=interval,
        mean_score=total / w,
        sum_score=total,
        rank=1,
    )


def interval_mean(series: ScoreSeries, interval: Interval) -> float:
    """Mean normalized score of frames with start <= timestamp < end."""
    mask = (series.timestamps >= interval.start) & (series.timestamps < interval.end)
    if not mask.any():
        raise ValueError(
            f"interval [{interval.start}, {interval.end}) contains no sampled frames"
        )
    return float(series.normalized[mask].mean())


def top_peaks(
    series: ScoreSeries,
    k: int,
    min_separation_seconds: float,
    clip_length_seconds: float,
) -> list[HighlightResult]:
    """Greedy non-maximum suppression peak picking.

    Repeatedly takes the highest-scoring frame at least
    ``min_separation_seconds`` away from every chosen peak and centers a
    ``clip_length_seconds`` window on it, clamped into the video span.
    Fewer than k peaks is a valid short result. Returned in timestamp
    order with ``rank`` recording score order.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    duration = series.duration
    if clip_length_seconds <= 0 or clip_length_seconds > duration:
        raise ValueError(
            f"clip length {clip_length_seconds}s must be in (0, {duration}]"
        )
    if min_separation_seconds < clip_length_seconds:
        raise ValueError(
            f"min separation {min_separation_seconds}s must be >= clip length "
            f"{clip_length_seconds}s"
        )

    scores = series.normalized
    timestamps = series.timestamps
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    chosen: list[tuple[float, Interval, int]] = []  # (peak_time, window, frame_idx)
    for idx in order:
        if len(chosen) >= k:
            break
        t = float(timestamps[idx])
        if any(abs(t - pt) < min_separation_seconds for pt, _, _ in chosen):
            continue
        start = t - clip_length_seconds / 2
        start = min(max(start, 0.0), duration - clip_length_seconds)
        window = Interval(start=start, end=start + clip_length_seconds)
        # boundary clamping slides windows inward, which can make two
        # windows overlap even with separated centers; skip those
        if any(window.overlaps(w) for _, w, _ in chosen):
            continue
        chosen.append((t, window, idx))

    results = []
    for rank, (t, window, idx) in enumerate(chosen, start=1):
        results.append(
            HighlightResult(
                interval=window,
                mean_score=interval_mean(series, window),
                sum_score=float(
                    series.normalized[
                        (timestamps >= window.start) & (timestamps < window.end)
                    ].sum()
                ),
                rank=rank,
                peak_time=t,
            )
        )
    results.sort(key=lambda r: r.interval.start)
    return results


def assemble_montage(
    video_path: str | os.PathLike,
    results: list[HighlightResult],
    out_path: str | os.PathLike,
    decoder: str | None = None,
) -> Path:
    """Cut each interval and concatenate them in timestamp order."""
    if not results:
        raise ValueError("montage needs at least one highlight interval")
    ordered = sorted(results, key=lambda r: r.interval.start)
    for a, b in zip(ordered, ordered[1:]):
        if a.interval.overlaps(b.interval):
            raise ValueError(
                f"montage intervals overlap: [{a.interval.start}, {a.interval.end}) "
                f"and [{b.interval.start}, {b.interval.end})"
            )
    if len(ordered) == 1:
        return media.cut_clip(video_path, ordered[0].interval, out_path, decoder=decoder)
    with tempfile.TemporaryDirectory(prefix="framespot-montage-") as tmp:
        parts = []
        for i, result in enumerate(ordered):
            part = Path(tmp) / f"part{i:03d}.mp4"
            media.cut_clip(video_path, result.interval, part, decoder=decoder)
            parts.append(part)
        return media.concat_clips(parts, out_path, decoder=decoder)
