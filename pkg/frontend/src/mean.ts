/** Interval arithmetic over a score series, mirroring the service exactly:
 * the mean covers frames with start <= timestamp < end.
 */

import type { Interval } from "./types.js";

/** Mean normalized score inside [start, end); null when no frame falls inside. */
export function intervalMean(
  normalized: number[],
  timestamps: number[],
  start: number,
  end: number,
): number | null {
  let sum = 0;
  let count = 0;
  for (let i = 0; i < timestamps.length; i++) {
    const t = timestamps[i];
    if (t >= start && t < end) {
      sum += normalized[i];
      count += 1;
    }
  }
  return count === 0 ? null : sum / count;
}

/** Snap a raw brush range to sampled-frame boundaries.
 *
 * The start snaps down to the covering frame's timestamp and the end up
 * to the last covered frame's boundary (+1/rate), so the result always
 * contains at least one sampled frame. Zero-width brushes return null.
 */
export function snapBrush(
  rawStart: number,
  rawEnd: number,
  timestamps: number[],
  rate: number,
): Interval | null {
  if (!(rawEnd > rawStart) || timestamps.length === 0) return null;
  const period = 1 / rate;
  let first = -1;
  let last = -1;
  for (let i = 0; i < timestamps.length; i++) {
    const t = timestamps[i];
    if (t + period > rawStart && t < rawEnd) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first < 0) return null;
  return { start: timestamps[first], end: timestamps[last] + period };
}

/** Index of the sampled frame nearest to time t. */
export function nearestFrame(timestamps: number[], t: number): number {
  if (timestamps.length === 0) return -1;
  let best = 0;
  let bestDist = Math.abs(timestamps[0] - t);
  for (let i = 1; i < timestamps.length; i++) {
    const d = Math.abs(timestamps[i] - t);
    if (d < bestDist) {
      best = i;
      bestDist = d;
    }
  }
  return best;
}
