/** Pure geometry for the highlight graph: y is the normalized score in
 * [0,1], x is the chronological frame position. DOM-free so the mapping
 * logic is directly testable.
 */

export interface GraphLayout {
  width: number;
  height: number;
}

export function xForIndex(index: number, count: number, layout: GraphLayout): number {
  if (count <= 1) return 0;
  return (index / (count - 1)) * layout.width;
}

export function yForScore(score: number, layout: GraphLayout): number {
  return (1 - score) * layout.height;
}

export function indexForX(px: number, count: number, layout: GraphLayout): number {
  if (count <= 1) return 0;
  const raw = Math.round((px / layout.width) * (count - 1));
  return Math.min(count - 1, Math.max(0, raw));
}

/** SVG polyline points attribute for the score curve. */
export function polylinePoints(normalized: number[], layout: GraphLayout): string {
  return normalized
    .map((v, i) => `${xForIndex(i, normalized.length, layout)},${yForScore(v, layout)}`)
    .join(" ");
}

/** Pixel x-range covered by a time interval, given frame timestamps. */
export function intervalToPixels(
  start: number,
  end: number,
  timestamps: number[],
  rate: number,
  layout: GraphLayout,
): { x0: number; x1: number } {
  const n = timestamps.length;
  const period = 1 / rate;
  const t0 = timestamps[0];
  const span = timestamps[n - 1] - t0 || period;
  const clamp = (v: number) => Math.min(layout.width, Math.max(0, v));
  return {
    x0: clamp(((start - t0) / span) * layout.width),
    x1: clamp(((end - period - t0) / span) * layout.width),
  };
}

/** Time at a pixel position, by linear interpolation over the span. */
export function timeForX(px: number, timestamps: number[], layout: GraphLayout): number {
  const n = timestamps.length;
  if (n === 0) return 0;
  if (n === 1) return timestamps[0];
  const frac = Math.min(1, Math.max(0, px / layout.width));
  return timestamps[0] + frac * (timestamps[n - 1] - timestamps[0]);
}
