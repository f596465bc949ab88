/**
 * Thin typed client for the spacesteer HTTP API.
 *
 * The transport is injectable so tests can script responses without a
 * network; the browser entry point passes nothing and gets global fetch.
 */

import type {
  BaselineResponse,
  ConditionDict,
  EditResult,
  HealthResponse,
  PromptResponse,
  RunRecordDict,
  StatsRow,
  WorkspaceResponse,
  WorkspaceSummary,
} from "./types.js";
import type { Edit } from "./edits.js";

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

/** Error from a non-2xx response, carrying the status and server detail. */
export class ApiError extends Error {
  readonly status: number;
  readonly detail: unknown;

  constructor(status: number, detail: unknown) {
    super(`API error ${status}: ${JSON.stringify(detail)}`);
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }

  /** 502 means the LLM provider failed; worth a retry affordance. */
  get isProviderError(): boolean {
    return this.status === 502;
  }
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? (globalThis.fetch as unknown as FetchLike);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: Parameters<FetchLike>[1] = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.base + path, init);
    const payload = await response.json();
    if (response.status < 200 || response.status >= 300) {
      throw new ApiError(response.status, payload);
    }
    return payload as T;
  }

  health(): Promise<HealthResponse> {
    return this.request("GET", "/health");
  }

  conditions(): Promise<ConditionDict[]> {
    return this.request("GET", "/conditions");
  }

  baseline(): Promise<BaselineResponse> {
    return this.request("GET", "/baseline");
  }

  listWorkspaces(): Promise<WorkspaceSummary[]> {
    return this.request("GET", "/workspaces");
  }

  getWorkspace(id: string): Promise<WorkspaceResponse> {
    return this.request("GET", `/workspaces/${encodeURIComponent(id)}`);
  }

  /**
   * Post one semantic edit. Both outcomes carry an EditResult: 200 applied,
   * 422 rejected with violations. Anything else raises.
   */
  async postEdit(id: string, edit: Edit): Promise<EditResult> {
    try {
      return await this.request<EditResult>(
        "POST", `/workspaces/${encodeURIComponent(id)}/edits`, edit);
    } catch (err) {
      if (err instanceof ApiError && err.status === 422 && isEditResult(err.detail)) {
        return err.detail;
      }
      throw err;
    }
  }

  getPrompt(id: string, condition: string): Promise<PromptResponse> {
    const query = `condition=${encodeURIComponent(condition)}`;
    return this.request("GET", `/workspaces/${encodeURIComponent(id)}/prompt?${query}`);
  }

  postRun(id: string, condition: string, temperature?: number): Promise<RunRecordDict> {
    const body: { condition: string; temperature?: number } = { condition };
    if (temperature !== undefined) body.temperature = temperature;
    return this.request("POST", `/workspaces/${encodeURIComponent(id)}/runs`, body);
  }

  getRun(runId: string): Promise<RunRecordDict> {
    return this.request("GET", `/runs/${encodeURIComponent(runId)}`);
  }

  planStats(planId: string): Promise<StatsRow[]> {
    return this.request("GET", `/plans/${encodeURIComponent(planId)}/stats?format=json`);
  }
}

function isEditResult(value: unknown): value is EditResult {
  return (
    typeof value === "object" &&
    value !== null &&
    "applied" in value &&
    "sequence" in value &&
    "violations" in value
  );
}
