"""Headless report rendering: highlight-graph figures plus CSV score dumps.

Figures mirror the interactive graph: normalized score on the y-axis over
chronological frame position on the x-axis, with the selected window(s)
shaded.
"""

from __future__ import annotations

import csv
import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .score import ScoreSeries
from .select import HighlightResult


def write_scores_csv(series: ScoreSeries, out_path: str | os.PathLike) -> Path:
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["frame_index", "timestamp_seconds", "raw_score", "normalized_score"])
        for i in range(len(series)):
            writer.writerow([
                i,
                f"{series.timestamps[i]:.6f}",
                f"{series.raw[i]:.9f}",
                f"{series.normalized[i]:.9f}",
            ])
    return out


def render_highlight_graph(
    series: ScoreSeries,
    out_path: str | os.PathLike,
    highlights: list[HighlightResult] | None = None,
    title: str | None = None,
) -> Path:
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(10, 3.2), dpi=120)
    ax.plot(range(len(series)), series.normalized, lw=1.0, color="#2b6cb0")
    for hl in highlights or []:
        mask_lo = hl.interval.start * series.sampling_rate
        mask_hi = hl.interval.end * series.sampling_rate
        ax.axvspan(mask_lo, mask_hi, color="#f6ad55", alpha=0.35,
                   label=f"window {hl.rank}" if hl.rank == 1 else None)
        ax.axhline(hl.mean_score, ls="--", lw=0.8, color="#c05621")
    ax.set_xlabel("frame (chronological)")
    ax.set_ylabel("normalized highlight score")
    ax.set_ylim(-0.05, 1.05)
    ax.set_xlim(0, max(1, len(series) - 1))
    if title:
        ax.set_title(title)
    if highlights:
        ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
    return out


def write_report(
    series: ScoreSeries,
    out_dir: str | os.PathLike,
    highlights: list[HighlightResult] | None = None,
    basename: str = "highlights",
    title: str | None = None,
) -> dict:
    """Emit <basename>.csv and <basename>.png into out_dir."""
    out_dir = Path(out_dir)
    csv_path = write_scores_csv(series, out_dir / f"{basename}.csv")
    fig_path = render_highlight_graph(
        series, out_dir / f"{basename}.png", highlights=highlights, title=title
    )
    return {"csv": str(csv_path), "figure": str(fig_path)}
