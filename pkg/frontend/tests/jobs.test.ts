import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { pollJob } from "../src/jobs.js";
import type { JobStatus } from "../src/types.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function scriptedStatuses(phases: JobStatus["phase"][]): ApiClient {
  let call = 0;
  return new ApiClient(async (input) => {
    expect(input).toBe("/jobs/j1");
    const phase = phases[Math.min(call, phases.length - 1)];
    call += 1;
    return jsonResponse({
      job_id: "j1", phase, progress: call / phases.length, error: null,
      project_id: "p", series_id: phase === "done" ? "sid" : null,
      phases_seen: phases.slice(0, call),
    });
  });
}

describe("pollJob", () => {
  it("polls until done and reports each update", async () => {
    const api = scriptedStatuses(["sampling", "embedding", "prior", "scoring", "done"]);
    const seen: string[] = [];
    const final = await pollJob(api, "j1", {
      intervalMs: 1,
      onUpdate: (s) => seen.push(s.phase),
    });
    expect(final.phase).toBe("done");
    expect(final.series_id).toBe("sid");
    expect(seen).toEqual(["sampling", "embedding", "prior", "scoring", "done"]);
  });

  it("settles on failure", async () => {
    const api = scriptedStatuses(["sampling", "failed"]);
    const final = await pollJob(api, "j1", { intervalMs: 1 });
    expect(final.phase).toBe("failed");
  });

  it("times out when the job never settles", async () => {
    const api = scriptedStatuses(["embedding"]);
    await expect(
      pollJob(api, "j1", { intervalMs: 1, timeoutMs: 10 }),
    ).rejects.toThrow(/timed out/);
  });

  it("surfaces HTTP errors from the status endpoint", async () => {
    const api = new ApiClient(async () =>
      jsonResponse({ detail: "unknown job: j1" }, 404),
    );
    await expect(pollJob(api, "j1", { intervalMs: 1 })).rejects.toThrow(/404/);
  });
});
