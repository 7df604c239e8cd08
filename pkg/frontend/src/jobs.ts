/**
 * Submit-and-watch flow for a scenario run: submit, poll until the job
 * settles, then pull the report bytes. Failures keep the service's message
 * untouched so feasibility explanations reach the form as written.
 */

import { parseReport, pollJob, ServiceClient, type PollOptions } from "./api.js";
import { describeConfig } from "./form.js";
import type { ConfigPatch, JobStatus, ServiceReport } from "./types.js";

export interface TrackedRun {
  job: JobStatus;
  label: string;
  /** present only when the job finished */
  text?: string;
  report?: ServiceReport;
}

export async function runScenario(
  client: ServiceClient,
  dataset: string,
  config: ConfigPatch = {},
  opts: PollOptions = {},
): Promise<TrackedRun> {
  let job = await client.submitScenario(dataset, config);
  opts.onUpdate?.(job);
  if (job.state !== "done" && job.state !== "failed") {
    job = await pollJob(client, job.id, opts);
  }
  const label = describeConfig(config);
  if (job.state === "failed") return { job, label };
  const text = await client.reportText(job.id);
  return { job, label, text, report: parseReport(text) };
}

/** One-line progress text for a job card. */
export function stageLine(job: JobStatus): string {
  if (job.state === "queued") return "queued";
  if (job.state === "failed") return `failed: ${job.error ?? "unknown error"}`;
  if (job.state === "done") {
    return job.stages.length ? job.stages.join(" · ") : "served from cache";
  }
  const done = job.stages.join(" · ");
  return done ? `${done}…` : "running…";
}
