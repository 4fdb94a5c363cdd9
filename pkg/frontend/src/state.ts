/** Client-side state with pure transition functions.
 *
 * Fetched score payloads are stored as-is and never mutated; switching
 * the active series only changes which id is active.
 */

import type { Interval, JobStatus, ScorePayload } from "./types.js";

export interface AppState {
  projectId: string | null;
  duration: number;
  seriesIds: string[];
  activeSeriesId: string | null;
  seriesById: Record<string, ScorePayload>;
  brush: Interval | null;
  playhead: number;
  suggestion: Interval | null;
  pendingJobs: JobStatus[];
  error: string | null;
  lastExportPath: string | null;
}

export function initialState(): AppState {
  return {
    projectId: null,
    duration: 0,
    seriesIds: [],
    activeSeriesId: null,
    seriesById: {},
    brush: null,
    playhead: 0,
    suggestion: null,
    pendingJobs: [],
    error: null,
    lastExportPath: null,
  };
}

export function withProject(state: AppState, projectId: string, duration: number): AppState {
  return { ...initialState(), projectId, duration };
}

export function withSeries(state: AppState, payload: ScorePayload): AppState {
  const id = payload.series_id;
  if (!id) throw new Error("score payload is missing series_id");
  const known = state.seriesIds.includes(id);
  return {
    ...state,
    seriesIds: known ? state.seriesIds : [...state.seriesIds, id],
    seriesById: known ? state.seriesById : { ...state.seriesById, [id]: payload },
    activeSeriesId: state.activeSeriesId ?? id,
  };
}

export function withActiveSeries(state: AppState, seriesId: string): AppState {
  if (!state.seriesIds.includes(seriesId)) {
    throw new Error(`unknown series: ${seriesId}`);
  }
  // a new series means new scores: stale brush/suggestion no longer apply
  return { ...state, activeSeriesId: seriesId, brush: null, suggestion: null };
}

export function activeSeries(state: AppState): ScorePayload | null {
  return state.activeSeriesId ? state.seriesById[state.activeSeriesId] ?? null : null;
}

export function withBrush(state: AppState, brush: Interval | null): AppState {
  return { ...state, brush };
}

export function withPlayhead(state: AppState, playhead: number): AppState {
  return { ...state, playhead: Math.min(state.duration, Math.max(0, playhead)) };
}

export function withSuggestion(state: AppState, suggestion: Interval | null): AppState {
  return { ...state, suggestion };
}

export function withJob(state: AppState, job: JobStatus): AppState {
  const rest = state.pendingJobs.filter((j) => j.job_id !== job.job_id);
  const settled = job.phase === "done" || job.phase === "failed";
  return { ...state, pendingJobs: settled ? rest : [...rest, job] };
}

export function withError(state: AppState, error: string | null): AppState {
  return { ...state, error };
}

export function withExport(state: AppState, path: string): AppState {
  return { ...state, lastExportPath: path };
}
