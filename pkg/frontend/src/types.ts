/** Wire types for the framespot service HTTP/JSON API. */

export interface ScorePayload {
  schema_version: number;
  video_hash: string;
  sampling_rate: number;
  backend_fingerprint: string;
  provenance: { kind: string; keyword?: string; prompt?: string; prior_id?: string };
  smoothing: { window: number } | null;
  timestamps: number[];
  raw: number[];
  normalized: number[];
  series_id?: string;
}

export interface JobStatus {
  job_id: string;
  phase: "sampling" | "embedding" | "prior" | "scoring" | "done" | "failed";
  progress: number;
  error: string | null;
  project_id: string | null;
  series_id: string | null;
  phases_seen: string[];
}

export interface Interval {
  start: number;
  end: number;
}

export interface HighlightResult {
  interval: Interval;
  mean_score: number;
  sum_score: number;
  rank: number;
  peak_time: number | null;
}

export interface ProjectInfo {
  manifest: {
    project_id: string;
    video_path: string;
    keyword: string | null;
    prior_ids: string[];
    score_series_ids: string[];
    exports: { intervals: number[][]; path: string }[];
    sampling_rate: number;
  };
  duration: number;
  native_fps: number;
}

export interface PriorInfo {
  prior_id: string;
  keyword: string;
  photo_count: number;
  photo_refs: string[];
}
