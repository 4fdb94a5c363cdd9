/** Thin typed client over the service endpoints.
 *
 * The fetch implementation is injectable so tests can script the server.
 */

import type {
  HighlightResult,
  Interval,
  JobStatus,
  PriorInfo,
  ProjectInfo,
  ScorePayload,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = `${resp.status}`;
    try {
      const body = await resp.json();
      detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
    } catch {
      /* non-JSON error body */
    }
    throw new Error(`request failed (${resp.status}): ${detail}`);
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  constructor(
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
    private readonly base: string = "",
  ) {}

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.fetchFn(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => asJson<T>(r));
  }

  private get<T>(path: string): Promise<T> {
    return this.fetchFn(this.base + path).then((r) => asJson<T>(r));
  }

  createProject(videoPath: string, keyword?: string, rate?: number) {
    return this.post<{ project_id: string; job_id: string }>("/projects", {
      video_path: videoPath,
      keyword: keyword ?? null,
      rate: rate ?? null,
    });
  }

  jobStatus(jobId: string) {
    return this.get<JobStatus>(`/jobs/${jobId}`);
  }

  projectInfo(projectId: string) {
    return this.get<ProjectInfo>(`/projects/${projectId}`);
  }

  scores(projectId: string, seriesId?: string) {
    const query = seriesId ? `?series=${encodeURIComponent(seriesId)}` : "";
    return this.get<ScorePayload>(`/projects/${projectId}/scores${query}`);
  }

  thumbUrl(projectId: string, t: number, maxEdge = 320): string {
    return `${this.base}/projects/${projectId}/thumb?t=${t}&max_edge=${maxEdge}`;
  }

  async thumb(projectId: string, t: number, maxEdge = 320): Promise<Blob> {
    const resp = await this.fetchFn(this.thumbUrl(projectId, t, maxEdge));
    if (!resp.ok) throw new Error(`thumbnail failed (${resp.status})`);
    return resp.blob();
  }

  rescore(
    projectId: string,
    body: { keyword?: string; photo_paths?: string[]; text_prompt?: string },
  ) {
    return this.post<{ series_id: string; job_id: string }>(
      `/projects/${projectId}/rescore`,
      body,
    );
  }

  select(
    projectId: string,
    body: {
      series_id?: string;
      mode: "auto" | "peaks";
      length: number;
      k?: number;
      min_separation?: number;
    },
  ) {
    return this.post<{ series_id: string; results: HighlightResult[] }>(
      `/projects/${projectId}/select`,
      body,
    );
  }

  exportInterval(projectId: string, interval: Interval) {
    return this.post<{ path: string }>(`/projects/${projectId}/export`, { interval });
  }

  priorInfo(projectId: string, priorId: string) {
    return this.get<PriorInfo>(`/projects/${projectId}/priors/${priorId}`);
  }

  priorPhotoUrl(projectId: string, priorId: string, index: number): string {
    return `${this.base}/projects/${projectId}/priors/${priorId}/photos/${index}`;
  }
}
