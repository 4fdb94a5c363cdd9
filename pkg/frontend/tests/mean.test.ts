import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { intervalMean, nearestFrame, snapBrush } from "../src/mean.js";
import type { ScorePayload } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));
const fixture = JSON.parse(
  readFileSync(join(here, "fixtures", "interval_mean_cases.json"), "utf-8"),
) as {
  series: ScorePayload;
  cases: { start: number; end: number; expected_mean: number }[];
};

describe("intervalMean", () => {
  it("agrees with the service for 100 random brushes within 1e-9", () => {
    const { normalized, timestamps } = fixture.series;
    expect(fixture.cases.length).toBe(100);
    for (const c of fixture.cases) {
      const mean = intervalMean(normalized, timestamps, c.start, c.end);
      expect(mean).not.toBeNull();
      expect(Math.abs((mean as number) - c.expected_mean)).toBeLessThanOrEqual(1e-9);
    }
  });

  it("uses the half-open interval [start, end)", () => {
    const means = intervalMean([0.2, 0.4, 0.9], [0, 1, 2], 0, 2);
    expect(means).toBeCloseTo(0.3, 12); // frame at t=2 excluded
  });

  it("returns null when no frame falls inside", () => {
    expect(intervalMean([0.5, 0.5], [0, 1], 0.2, 0.9)).toBeNull();
  });
});

describe("snapBrush", () => {
  const timestamps = [0, 1, 2, 3, 4];

  it("snaps to frame boundaries", () => {
    const snapped = snapBrush(0.6, 2.4, timestamps, 1);
    expect(snapped).toEqual({ start: 0, end: 3 });
  });

  it("always contains at least one sampled frame", () => {
    const snapped = snapBrush(1.2, 1.4, timestamps, 1);
    expect(snapped).toEqual({ start: 1, end: 2 });
    const mean = intervalMean([0, 1, 0, 0, 0], timestamps, snapped!.start, snapped!.end);
    expect(mean).toBe(1);
  });

  it("ignores zero-width and inverted brushes", () => {
    expect(snapBrush(2, 2, timestamps, 1)).toBeNull();
    expect(snapBrush(3, 1, timestamps, 1)).toBeNull();
  });

  it("matches the snapped interval the export request will carry", () => {
    const { normalized, timestamps: ts, sampling_rate } = fixture.series;
    const snapped = snapBrush(10.3, 20.7, ts, sampling_rate)!;
    expect(snapped.start).toBe(10);
    expect(snapped.end).toBe(21);
    expect(intervalMean(normalized, ts, snapped.start, snapped.end)).not.toBeNull();
  });
});

describe("nearestFrame", () => {
  it("finds the closest sampled timestamp", () => {
    expect(nearestFrame([0, 1, 2, 3], 1.4)).toBe(1);
    expect(nearestFrame([0, 1, 2, 3], 1.6)).toBe(2);
    expect(nearestFrame([0, 1, 2, 3], -5)).toBe(0);
    expect(nearestFrame([0, 1, 2, 3], 99)).toBe(3);
    expect(nearestFrame([], 1)).toBe(-1);
  });
});
