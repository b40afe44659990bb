/**
 * Client for the evacest HTTP service. The editor does no estimation
 * math locally; every displayed number comes from these endpoints.
 */

import { GraphDoc, parseGraph, serializeGraph } from "./document.js";
import { EstimateDoc } from "./state.js";

export type FetchLike = (
  url: string,
  init?: {
    method?: string;
    headers?: Record<string, string>;
    body?: string;
    signal?: AbortSignal;
  }
) => Promise<{
  ok: boolean;
  status: number;
  text(): Promise<string>;
  json(): Promise<any>;
}>;

export class ServiceError extends Error {
  constructor(
    message: string,
    public status: number,
    public violations: Array<Record<string, string>> = []
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = fetch as unknown as FetchLike
  ) {}

  async estimate(doc: GraphDoc, signal?: AbortSignal): Promise<EstimateDoc> {
    const res = await this.fetchImpl(`${this.baseUrl}/estimate`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: serializeGraph(doc),
      signal,
    });
    if (!res.ok) {
      const body = await res.json().catch(() => ({}));
      throw new ServiceError(
        body.detail ?? `estimate failed (${res.status})`,
        res.status,
        body.violations ?? []
      );
    }
    return (await res.json()) as EstimateDoc;
  }

  async startSimulation(doc: GraphDoc, seed = 0): Promise<string> {
    const res = await this.fetchImpl(
      `${this.baseUrl}/simulate?seed=${seed}`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: serializeGraph(doc),
      }
    );
    if (!res.ok) {
      const body = await res.json().catch(() => ({}));
      throw new ServiceError(
        body.detail ?? `simulate failed (${res.status})`,
        res.status
      );
    }
    const body = await res.json();
    return body.job_id as string;
  }

  async jobStatus(jobId: string): Promise<Record<string, any>> {
    const res = await this.fetchImpl(`${this.baseUrl}/jobs/${jobId}`);
    if (!res.ok) throw new ServiceError(`job not found`, res.status);
    return await res.json();
  }

  /** PUT the canonical serialization; the service stores bytes verbatim. */
  async saveGraph(name: string, doc: GraphDoc): Promise<string> {
    const body = serializeGraph(doc);
    const res = await this.fetchImpl(`${this.baseUrl}/graphs/${name}`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body,
    });
    if (!res.ok) {
      const detail = await res.text().catch(() => "");
      throw new ServiceError(`save failed (${res.status}): ${detail}`, res.status);
    }
    return body;
  }

  /** Returns both the parsed document and the exact bytes served. */
  async loadGraph(
    name: string
  ): Promise<{ doc: GraphDoc; raw: string }> {
    const res = await this.fetchImpl(`${this.baseUrl}/graphs/${name}`);
    if (!res.ok) {
      throw new ServiceError(`graph not found: ${name}`, res.status);
    }
    const raw = await res.text();
    return { doc: parseGraph(raw), raw };
  }
}
