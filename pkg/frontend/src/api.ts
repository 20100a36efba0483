// Service client: job submission with polled progress, plus a fixture
// backend that serves recorded documents so the UI runs with no server.

import type { BPPDocument, JobStatus, PriorDensityResponse, SweepDocument } from "./types.js";

export interface Backend {
  submit(kind: "oc" | "sweep" | "bpp", config: unknown): Promise<string>;
  status(jobId: string): Promise<JobStatus>;
  result<T>(jobId: string): Promise<T>;
  priorDensity(priors: unknown): Promise<PriorDensityResponse>;
}

export class HttpBackend implements Backend {
  constructor(private baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = `${response.status}`;
      try {
        const body = await response.json();
        detail = body?.detail?.message ?? JSON.stringify(body);
      } catch {
        /* non-JSON error body */
      }
      throw new Error(`request failed: ${detail}`);
    }
    return (await response.json()) as T;
  }

  submit(kind: "oc" | "sweep" | "bpp", config: unknown): Promise<string> {
    return this.request<{ job_id: string }>(`/jobs/${kind}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    }).then((body) => body.job_id);
  }

  status(jobId: string): Promise<JobStatus> {
    return this.request<JobStatus>(`/jobs/${jobId}`);
  }

  result<T>(jobId: string): Promise<T> {
    return this.request<T>(`/jobs/${jobId}/result`);
  }

  priorDensity(priors: unknown): Promise<PriorDensityResponse> {
    return this.request<PriorDensityResponse>("/priors/density", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ priors }),
    });
  }
}

/** Poll a submitted job until done, reporting progress along the way. */
export async function awaitJob<T>(
  backend: Backend,
  jobId: string,
  onProgress?: (fraction: number) => void,
  intervalMs = 400,
): Promise<T> {
  for (;;) {
    const status = await backend.status(jobId);
    onProgress?.(status.progress);
    if (status.status === "done") return backend.result<T>(jobId);
    if (status.status === "failed") throw new Error(status.error ?? "job failed");
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
}

interface FixtureSet {
  sweep: SweepDocument;
  sweepNoDelay: SweepDocument;
  bpp: BPPDocument;
  priorDensity: PriorDensityResponse;
}

/** Serves the recorded fixture documents; sensitivity configs (p_dte = 0)
 * get the coupled-seed no-delay sweep. */
export class FixtureBackend implements Backend {
  private jobs = new Map<string, { kind: string; config: any }>();
  private counter = 0;

  constructor(private fixtures: FixtureSet) {}

  async submit(kind: "oc" | "sweep" | "bpp", config: unknown): Promise<string> {
    const jobId = `fixture-${++this.counter}`;
    this.jobs.set(jobId, { kind, config });
    return jobId;
  }

  async status(jobId: string): Promise<JobStatus> {
    if (!this.jobs.has(jobId)) throw new Error(`unknown job ${jobId}`);
    return { job_id: jobId, kind: this.jobs.get(jobId)!.kind, status: "done", progress: 1 };
  }

  async result<T>(jobId: string): Promise<T> {
    const job = this.jobs.get(jobId);
    if (!job) throw new Error(`unknown job ${jobId}`);
    if (job.kind === "bpp") return this.fixtures.bpp as T;
    const pDte = job.config?.priors?.p_dte;
    return (pDte === 0 ? this.fixtures.sweepNoDelay : this.fixtures.sweep) as T;
  }

  async priorDensity(): Promise<PriorDensityResponse> {
    return this.fixtures.priorDensity;
  }
}
