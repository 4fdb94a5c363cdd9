import { describe, expect, it } from "vitest";

import {
  activeSeries,
  initialState,
  withActiveSeries,
  withBrush,
  withJob,
  withPlayhead,
  withProject,
  withSeries,
} from "../src/state.js";
import type { JobStatus, ScorePayload } from "../src/types.js";

function payload(id: string, normalized = [0.1, 0.9, 0.4]): ScorePayload {
  return {
    schema_version: 1,
    video_hash: "h",
    sampling_rate: 1,
    backend_fingerprint: "stub",
    provenance: { kind: "text", prompt: id },
    smoothing: null,
    timestamps: normalized.map((_, i) => i),
    raw: [...normalized],
    normalized,
    series_id: id,
  };
}

function job(id: string, phase: JobStatus["phase"]): JobStatus {
  return {
    job_id: id, phase, progress: 0.5, error: null,
    project_id: "p", series_id: null, phases_seen: [phase],
  };
}

describe("state transitions", () => {
  it("collects series and activates the first by default", () => {
    let s = withProject(initialState(), "p", 60);
    s = withSeries(s, payload("a"));
    s = withSeries(s, payload("b"));
    expect(s.seriesIds).toEqual(["a", "b"]);
    expect(s.activeSeriesId).toBe("a");
    expect(activeSeries(s)?.series_id).toBe("a");
  });

  it("switching series never mutates fetched score arrays", () => {
    const a = payload("a");
    const b = payload("b", [0.3, 0.3, 0.3]);
    let s = withSeries(withSeries(withProject(initialState(), "p", 60), a), b);
    const beforeArrays = {
      a: s.seriesById["a"].normalized,
      b: s.seriesById["b"].normalized,
    };
    const snapshotA = [...beforeArrays.a];
    s = withActiveSeries(s, "b");
    s = withActiveSeries(s, "a");
    // identity preserved (no copies, no mutation)
    expect(Object.is(s.seriesById["a"].normalized, beforeArrays.a)).toBe(true);
    expect(Object.is(s.seriesById["b"].normalized, beforeArrays.b)).toBe(true);
    expect(s.seriesById["a"].normalized).toEqual(snapshotA);
  });

  it("switching series clears the brush and suggestion", () => {
    let s = withSeries(withSeries(withProject(initialState(), "p", 60),
                                  payload("a")), payload("b"));
    s = withBrush(s, { start: 0, end: 2 });
    s = withActiveSeries(s, "b");
    expect(s.brush).toBeNull();
    expect(s.suggestion).toBeNull();
  });

  it("rejects activating an unknown series", () => {
    const s = withSeries(withProject(initialState(), "p", 60), payload("a"));
    expect(() => withActiveSeries(s, "nope")).toThrow(/unknown series/);
  });

  it("clamps the playhead into [0, duration]", () => {
    const s = withProject(initialState(), "p", 60);
    expect(withPlayhead(s, -3).playhead).toBe(0);
    expect(withPlayhead(s, 30).playhead).toBe(30);
    expect(withPlayhead(s, 600).playhead).toBe(60);
  });

  it("tracks pending jobs and drops settled ones", () => {
    let s = withProject(initialState(), "p", 60);
    s = withJob(s, job("j1", "embedding"));
    expect(s.pendingJobs).toHaveLength(1);
    s = withJob(s, job("j1", "scoring"));
    expect(s.pendingJobs).toHaveLength(1);
    expect(s.pendingJobs[0].phase).toBe("scoring");
    s = withJob(s, job("j1", "done"));
    expect(s.pendingJobs).toHaveLength(0);
  });
});
