#!/usr/bin/env python3
"""Regenerate the frontend interval-mean agreement fixture.

Builds a deterministic score series in the service wire format plus 100
random brush intervals with their service-side interval means; the
frontend test asserts its own mean computation matches within 1e-9.

Usage: python scripts/gen_ui_fixture.py [out.json]
"""

import json
import sys
from pathlib import Path

import numpy as np

from framespot.media import Interval
from framespot.score import ScoreSeries, normalize_scores
from framespot.select import interval_mean

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else (
    Path(__file__).resolve().parent.parent
    / "frontend" / "tests" / "fixtures" / "interval_mean_cases.json"
)


def main() -> None:
    rng = np.random.default_rng(2024)
    n, rate = 60, 1.0
    raw = rng.uniform(-0.2, 0.4, n)
    series = ScoreSeries(
        raw=raw,
        normalized=normalize_scores(raw),
        timestamps=np.arange(n, dtype=np.float64) / rate,
        provenance={"kind": "text", "prompt": "fixture"},
        sampling_rate=rate,
        video_hash="uifixture",
        backend_fingerprint="stub:32:v1",
    )
    duration = series.duration

    cases = []
    while len(cases) < 100:
        a, b = sorted(rng.uniform(0, duration, 2))
        if b - a < 1e-6:
            continue
        interval = Interval(float(a), float(b))
        try:
            mean = interval_mean(series, interval)
        except ValueError:
            continue  # brush missed every sampled frame
        cases.append({"start": interval.start, "end": interval.end,
                      "expected_mean": mean})

    payload = series.to_json()
    payload["series_id"] = "fixture-series"
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"series": payload, "cases": cases}, indent=2))
    print(f"wrote {len(cases)} cases to {OUT}")


if __name__ == "__main__":
    main()
