/** Poll a job until it settles. */

import type { ApiClient } from "./api.js";
import type { JobStatus } from "./types.js";

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
  onUpdate?: (status: JobStatus) => void;
}

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export async function pollJob(
  api: ApiClient,
  jobId: string,
  options: PollOptions = {},
): Promise<JobStatus> {
  const intervalMs = options.intervalMs ?? 400;
  const timeoutMs = options.timeoutMs ?? 10 * 60_000;
  const startedAt = Date.now();
  for (;;) {
    const status = await api.jobStatus(jobId);
    options.onUpdate?.(status);
    if (status.phase === "done" || status.phase === "failed") return status;
    if (Date.now() - startedAt >= timeoutMs) {
      throw new Error(`job ${jobId} timed out after ${timeoutMs} ms`);
    }
    await sleep(intervalMs);
  }
}
