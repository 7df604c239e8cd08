/**
 * Thin typed client over the scenario service.
 *
 * Reports are fetched as raw text and kept byte for byte: the client never
 * re-serializes what it later shows, so what you download is exactly what
 * the service (and the command line) produced.
 */

import type {
  ConfigPatch,
  DatasetEntry,
  HealthDoc,
  JobStatus,
  RegisterResponse,
  ServiceReport,
  SitesDoc,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ServiceError";
  }
}

async function errorDetail(res: Response): Promise<string> {
  // FastAPI wraps errors as {"detail": ...}; fall back to the raw body
  const text = await res.text();
  try {
    const body = JSON.parse(text);
    if (typeof body.detail === "string") return body.detail;
    if (body.detail !== undefined) return JSON.stringify(body.detail);
  } catch {
    // not JSON; use the text as-is
  }
  return text || `HTTP ${res.status}`;
}

export class ServiceClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const res = await this.fetchImpl(this.base + path, init);
    if (!res.ok) throw new ServiceError(res.status, await errorDetail(res));
    return res;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    return (await this.request(path, init)).json() as Promise<T>;
  }

  private post(path: string, body: unknown): Promise<Response> {
    return this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async registerDataset(path: string): Promise<RegisterResponse> {
    return (await this.post("/datasets", { path })).json();
  }

  listDatasets(): Promise<DatasetEntry[]> {
    return this.json("/datasets");
  }

  datasetSites(fingerprint: string): Promise<SitesDoc> {
    return this.json(`/datasets/${fingerprint}/sites`);
  }

  async submitScenario(dataset: string, config: ConfigPatch = {}): Promise<JobStatus> {
    return (await this.post("/scenarios", { dataset, config })).json();
  }

  jobStatus(id: string): Promise<JobStatus> {
    return this.json(`/scenarios/${id}`);
  }

  /** The canonical report document, byte-identical to the CLI output. */
  async reportText(id: string): Promise<string> {
    return (await this.request(`/scenarios/${id}/report`)).text();
  }

  async cancelJob(id: string): Promise<JobStatus> {
    return (await this.request(`/scenarios/${id}`, { method: "DELETE" })).json();
  }

  health(): Promise<HealthDoc> {
    return this.json("/health");
  }
}

/** Parse a report document, refusing schemas this client does not know. */
export function parseReport(text: string): ServiceReport {
  const doc = JSON.parse(text) as ServiceReport;
  if (doc.schema_version !== "1") {
    throw new Error(`unsupported report schema ${JSON.stringify(doc.schema_version)}`);
  }
  if (typeof doc.dataset_fingerprint !== "string" || typeof doc.result !== "object") {
    throw new Error("malformed report document");
  }
  return doc;
}

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
  sleep?: (ms: number) => Promise<void>;
  onUpdate?: (status: JobStatus) => void;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

/** Poll a job until it settles (done or failed). */
export async function pollJob(
  client: ServiceClient,
  id: string,
  opts: PollOptions = {},
): Promise<JobStatus> {
  const interval = opts.intervalMs ?? 500;
  const sleep = opts.sleep ?? defaultSleep;
  const deadline = Date.now() + (opts.timeoutMs ?? 300_000);
  for (;;) {
    const status = await client.jobStatus(id);
    opts.onUpdate?.(status);
    if (status.state === "done" || status.state === "failed") return status;
    if (Date.now() >= deadline) {
      throw new Error(`scenario ${id} is still ${status.state} after the polling deadline`);
    }
    await sleep(interval);
  }
}
