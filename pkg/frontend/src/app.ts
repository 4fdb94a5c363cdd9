/** DOM wiring for the highlight workbench.
 *
 * All scoring math and geometry live in the pure modules (mean, graph,
 * state); this file only moves values between them and the document.
 */

import { ApiClient } from "./api.js";
import {
  GraphLayout,
  indexForX,
  intervalToPixels,
  polylinePoints,
  timeForX,
  xForIndex,
  yForScore,
} from "./graph.js";
import { pollJob } from "./jobs.js";
import { intervalMean, nearestFrame, snapBrush } from "./mean.js";
import { ThumbLoader } from "./scrub.js";
import {
  AppState,
  activeSeries,
  initialState,
  withActiveSeries,
  withBrush,
  withError,
  withExport,
  withJob,
  withPlayhead,
  withProject,
  withSeries,
  withSuggestion,
} from "./state.js";
import type { Interval, JobStatus, ScorePayload } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const LAYOUT: GraphLayout = { width: 900, height: 220 };
const DEFAULT_HIGHLIGHT_SECONDS = 10;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

export class App {
  private state: AppState = initialState();
  private readonly thumbLoader: ThumbLoader<Blob>;
  private brushAnchor: number | null = null;

  private readonly root: HTMLElement;
  private readonly errorBanner: HTMLElement;
  private readonly jobBar: HTMLElement;
  private readonly seriesSelect: HTMLSelectElement;
  private readonly svg: SVGElement;
  private readonly thumbImage: HTMLImageElement;
  private readonly scrubLabel: HTMLElement;
  private readonly brushLabel: HTMLElement;
  private readonly exportButton: HTMLButtonElement;
  private readonly exportNote: HTMLElement;
  private readonly photoStrip: HTMLElement;

  constructor(
    container: HTMLElement,
    private readonly api: ApiClient = new ApiClient(),
  ) {
    this.root = container;
    this.errorBanner = el("div", { class: "error-banner hidden" });
    this.jobBar = el("div", { class: "job-bar hidden" });
    this.seriesSelect = el("select", { class: "series-select" });
    this.svg = svgEl("svg", {
      viewBox: `0 0 ${LAYOUT.width} ${LAYOUT.height}`,
      class: "graph",
      preserveAspectRatio: "none",
    });
    this.thumbImage = el("img", { class: "thumb", alt: "frame preview" });
    this.scrubLabel = el("div", { class: "scrub-label" }, "scrub the graph to inspect frames");
    this.brushLabel = el("div", { class: "brush-label" });
    this.exportButton = el("button", { disabled: "true" }, "Export selection") as HTMLButtonElement;
    this.exportNote = el("div", { class: "export-note" });
    this.photoStrip = el("div", { class: "photo-strip" });

    this.thumbLoader = new ThumbLoader(
      (t) => this.api.thumb(this.requireProject(), t),
      (t, blob) => {
        this.thumbImage.src = URL.createObjectURL(blob);
      },
      () => {},
    );
    this.build();
  }

  private requireProject(): string {
    if (!this.state.projectId) throw new Error("no project open");
    return this.state.projectId;
  }

  private setState(next: AppState): void {
    this.state = next;
    this.render();
  }

  private fail(err: unknown): void {
    this.setState(withError(this.state, err instanceof Error ? err.message : String(err)));
  }

  // -- layout -------------------------------------------------------------

  private build(): void {
    this.root.append(this.errorBanner);

    const openForm = el("form", { class: "open-form" });
    const videoInput = el("input", {
      type: "text",
      placeholder: "absolute path to a video on the service machine",
      size: "60",
    }) as HTMLInputElement;
    const keywordInput = el("input", {
      type: "text",
      placeholder: "keyword (blank = auto-classify)",
    }) as HTMLInputElement;
    const openButton = el("button", { type: "submit" }, "Open video");
    openForm.append(videoInput, keywordInput, openButton);
    openForm.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.openProject(videoInput.value.trim(), keywordInput.value.trim() || undefined);
    });
    this.root.append(openForm, this.jobBar);

    const graphWrap = el("div", { class: "graph-wrap" });
    graphWrap.append(this.svg);
    this.root.append(graphWrap);
    this.svg.addEventListener("mousemove", (ev) => this.onScrub(ev as MouseEvent));
    this.svg.addEventListener("mousedown", (ev) => this.onBrushStart(ev as MouseEvent));
    this.svg.addEventListener("mouseup", (ev) => this.onBrushEnd(ev as MouseEvent));

    const inspect = el("div", { class: "inspect-row" });
    inspect.append(this.thumbImage, this.scrubLabel, this.brushLabel);
    this.root.append(inspect);

    const controls = el("div", { class: "controls" });
    const rescoreForm = el("form", { class: "rescore-form" });
    const rescoreInput = el("input", {
      type: "text",
      placeholder: "new keyword, text prompt, or photo paths (comma separated)",
      size: "48",
    }) as HTMLInputElement;
    const modeSelect = el("select") as HTMLSelectElement;
    for (const [value, label] of [
      ["keyword", "keyword"],
      ["text_prompt", "text prompt (baseline)"],
      ["photo_paths", "photo paths (personal prior)"],
    ]) {
      modeSelect.append(el("option", { value }, label));
    }
    const rescoreButton = el("button", { type: "submit" }, "Rescore");
    rescoreForm.append(modeSelect, rescoreInput, rescoreButton);
    rescoreForm.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.rescore(modeSelect.value, rescoreInput.value.trim());
    });

    this.seriesSelect.addEventListener("change", () => {
      this.setState(withActiveSeries(this.state, this.seriesSelect.value));
      void this.loadSuggestion();
      void this.loadPhotoStrip();
    });
    this.exportButton.addEventListener("click", () => void this.exportBrush());

    controls.append(rescoreForm, this.seriesSelect, this.exportButton, this.exportNote);
    this.root.append(controls, this.photoStrip);
  }

  // -- actions ------------------------------------------------------------

  async openProject(videoPath: string, keyword?: string): Promise<void> {
    if (!videoPath) return;
    try {
      const created = await this.api.createProject(videoPath, keyword);
      const status = await this.trackJob(created.job_id);
      if (status.phase === "failed") throw new Error(status.error ?? "analysis failed");
      const info = await this.api.projectInfo(created.project_id);
      this.setState(withProject(this.state, created.project_id, info.duration));
      const payload = await this.api.scores(created.project_id, status.series_id ?? undefined);
      this.setState(withSeries(this.state, payload));
      await this.loadSuggestion();
      await this.loadPhotoStrip();
    } catch (err) {
      this.fail(err);
    }
  }

  async rescore(mode: string, value: string): Promise<void> {
    if (!value || !this.state.projectId) return;
    const body =
      mode === "keyword"
        ? { keyword: value }
        : mode === "text_prompt"
          ? { text_prompt: value }
          : { photo_paths: value.split(",").map((p) => p.trim()).filter(Boolean) };
    try {
      const queued = await this.api.rescore(this.state.projectId, body);
      const status = await this.trackJob(queued.job_id);
      if (status.phase === "failed") throw new Error(status.error ?? "rescore failed");
      const payload = await this.api.scores(this.state.projectId, queued.series_id);
      this.setState(withActiveSeries(withSeries(this.state, payload), queued.series_id));
      await this.loadSuggestion();
      await this.loadPhotoStrip();
    } catch (err) {
      this.fail(err);
    }
  }

  private async trackJob(jobId: string): Promise<JobStatus> {
    const status = await pollJob(this.api, jobId, {
      onUpdate: (s) => this.setState(withJob(this.state, s)),
    });
    this.setState(withJob(this.state, status));
    return status;
  }

  private async loadSuggestion(): Promise<void> {
    const series = activeSeries(this.state);
    if (!series || !this.state.projectId) return;
    try {
      const picked = await this.api.select(this.state.projectId, {
        series_id: series.series_id,
        mode: "auto",
        length: Math.min(DEFAULT_HIGHLIGHT_SECONDS, this.state.duration),
      });
      this.setState(withSuggestion(this.state, picked.results[0]?.interval ?? null));
    } catch {
      this.setState(withSuggestion(this.state, null));
    }
  }

  private async loadPhotoStrip(): Promise<void> {
    this.photoStrip.replaceChildren();
    const series = activeSeries(this.state);
    const priorId = series?.provenance.prior_id;
    if (!series || !priorId || !this.state.projectId) return;
    try {
      const info = await this.api.priorInfo(this.state.projectId, priorId);
      const title = el("span", { class: "strip-title" },
        `prior photos (${info.keyword || "personal"})`);
      this.photoStrip.append(title);
      for (let i = 0; i < info.photo_count; i++) {
        this.photoStrip.append(
          el("img", {
            src: this.api.priorPhotoUrl(this.state.projectId, priorId, i),
            class: "strip-photo",
            alt: info.photo_refs[i] ?? `photo ${i}`,
          }),
        );
      }
    } catch {
      /* strip is decorative; photos may live off-disk */
    }
  }

  async exportBrush(): Promise<void> {
    const brush = this.state.brush;
    if (!brush || !this.state.projectId) return;
    try {
      const result = await this.api.exportInterval(this.state.projectId, brush);
      this.setState(withExport(this.state, result.path));
    } catch (err) {
      this.fail(err);
    }
  }

  // -- graph interaction ----------------------------------------------------

  private graphX(ev: MouseEvent): number {
    const rect = (this.svg as unknown as HTMLElement).getBoundingClientRect();
    const frac = rect.width > 0 ? (ev.clientX - rect.left) / rect.width : 0;
    return frac * LAYOUT.width;
  }

  private onScrub(ev: MouseEvent): void {
    const series = activeSeries(this.state);
    if (!series) return;
    const px = this.graphX(ev);
    const t = timeForX(px, series.timestamps, LAYOUT);
    this.setState(withPlayhead(this.state, t));
    const idx = nearestFrame(series.timestamps, t);
    if (idx >= 0) {
      this.scrubLabel.textContent =
        `t=${series.timestamps[idx].toFixed(1)}s  score=${series.normalized[idx].toFixed(3)}`;
    }
    this.thumbLoader.request(t);
    if (this.brushAnchor !== null && ev.buttons === 1) {
      this.previewBrush(this.brushAnchor, px, series);
    }
  }

  private onBrushStart(ev: MouseEvent): void {
    this.brushAnchor = this.graphX(ev);
  }

  private onBrushEnd(ev: MouseEvent): void {
    const series = activeSeries(this.state);
    if (series && this.brushAnchor !== null) {
      this.previewBrush(this.brushAnchor, this.graphX(ev), series);
    }
    this.brushAnchor = null;
  }

  private previewBrush(x0: number, x1: number, series: ScorePayload): void {
    const [lo, hi] = x0 <= x1 ? [x0, x1] : [x1, x0];
    const t0 = timeForX(lo, series.timestamps, LAYOUT);
    const t1 = timeForX(hi, series.timestamps, LAYOUT);
    const snapped = snapBrush(t0, t1, series.timestamps, series.sampling_rate);
    this.setState(withBrush(this.state, snapped));
  }

  // -- rendering --------------------------------------------------------------

  brushMeanLabel(series: ScorePayload, brush: Interval): string {
    const mean = intervalMean(series.normalized, series.timestamps, brush.start, brush.end);
    return mean === null
      ? ""
      : `selection ${brush.start.toFixed(1)}s .. ${brush.end.toFixed(1)}s  mean=${mean.toFixed(3)}`;
  }

  private render(): void {
    this.errorBanner.classList.toggle("hidden", !this.state.error);
    this.errorBanner.textContent = this.state.error ?? "";

    const jobs = this.state.pendingJobs;
    this.jobBar.classList.toggle("hidden", jobs.length === 0);
    this.jobBar.textContent = jobs
      .map((j) => `${j.phase} ${(j.progress * 100).toFixed(0)}%`)
      .join("  |  ");

    const ids = this.state.seriesIds;
    if (this.seriesSelect.length !== ids.length) {
      this.seriesSelect.replaceChildren(
        ...ids.map((id) => {
          const payload = this.state.seriesById[id];
          const kind = payload.provenance.kind === "text"
            ? `prompt: ${payload.provenance.prompt}`
            : `keyword: ${payload.provenance.keyword || "personal photos"}`;
          return el("option", { value: id }, kind);
        }),
      );
    }
    if (this.state.activeSeriesId) this.seriesSelect.value = this.state.activeSeriesId;

    this.renderGraph();

    const series = activeSeries(this.state);
    const brush = this.state.brush;
    this.brushLabel.textContent =
      series && brush ? this.brushMeanLabel(series, brush) : "";
    this.exportButton.disabled = !brush;
    this.exportNote.textContent = this.state.lastExportPath
      ? `exported: ${this.state.lastExportPath}`
      : "";
  }

  private renderGraph(): void {
    this.svg.replaceChildren();
    const series = activeSeries(this.state);
    if (!series || series.normalized.length === 0) {
      this.svg.append(svgEl("rect", {
        x: "0", y: "0", width: String(LAYOUT.width), height: String(LAYOUT.height),
        class: "graph-disabled",
      }));
      return;
    }
    const { timestamps, normalized, sampling_rate: rate } = series;

    if (this.state.suggestion) {
      const { x0, x1 } = intervalToPixels(
        this.state.suggestion.start, this.state.suggestion.end, timestamps, rate, LAYOUT,
      );
      this.svg.append(svgEl("rect", {
        x: String(x0), y: "0", width: String(Math.max(1, x1 - x0)),
        height: String(LAYOUT.height), class: "suggestion",
      }));
    }

    if (this.state.brush) {
      const { x0, x1 } = intervalToPixels(
        this.state.brush.start, this.state.brush.end, timestamps, rate, LAYOUT,
      );
      this.svg.append(svgEl("rect", {
        x: String(x0), y: "0", width: String(Math.max(1, x1 - x0)),
        height: String(LAYOUT.height), class: "brush",
      }));
      const mean = intervalMean(normalized, timestamps,
                                this.state.brush.start, this.state.brush.end);
      if (mean !== null) {
        const y = String(yForScore(mean, LAYOUT));
        this.svg.append(svgEl("line", {
          x1: String(x0), x2: String(x1), y1: y, y2: y, class: "mean-line",
        }));
      }
    }

    this.svg.append(svgEl("polyline", {
      points: polylinePoints(normalized, LAYOUT),
      class: "score-line",
      fill: "none",
    }));

    const playheadIdx = nearestFrame(timestamps, this.state.playhead);
    if (playheadIdx >= 0) {
      const x = String(xForIndex(playheadIdx, normalized.length, LAYOUT));
      this.svg.append(svgEl("line", {
        x1: x, x2: x, y1: "0", y2: String(LAYOUT.height), class: "playhead",
      }));
    }
  }

  /** Snapshot for tests and debugging. */
  snapshot(): AppState {
    return this.state;
  }
}

export { indexForX };
