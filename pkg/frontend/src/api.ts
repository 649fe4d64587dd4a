// Thin REST client for the /v1 endpoints. Stale-version answers surface as
// StaleVersionError so the wizard can refetch and retry; validation errors
// carry the service's code/path/message payload.

import type {
  Answer,
  AnswerAccepted,
  EnvDoc,
  EnvironmentComparisonDoc,
  ErrorDoc,
  PlanDoc,
  PlanResultDoc,
  SessionCreated,
  TraceDoc,
  TranscriptDoc,
  VariationDoc,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly payload: ErrorDoc,
  ) {
    super(`${payload.code}: ${payload.message}`);
  }
}

export class StaleVersionError extends ServiceError {}

export type Fetch = typeof fetch;

/** The service surface the views depend on; ApiClient is the HTTP binding. */
export interface ServiceApi {
  createSession(before: EnvDoc, after: EnvDoc, ontology?: unknown): Promise<SessionCreated>;
  postAnswer(sessionId: string, version: number, answer: Answer): Promise<AnswerAccepted>;
  transcript(sessionId: string): Promise<TranscriptDoc>;
  variationDocument(sessionId: string): Promise<string>;
  compare(env: EnvDoc, variation: VariationDoc, ontology?: unknown): Promise<EnvironmentComparisonDoc>;
  plan(env: EnvDoc, variation: VariationDoc, ontology?: unknown): Promise<PlanResultDoc>;
  execute(env: EnvDoc, plan: PlanDoc, variation?: VariationDoc, ontology?: unknown): Promise<TraceDoc>;
}

export class ApiClient implements ServiceApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: Fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      const payload = (await response.json()) as ErrorDoc;
      if (response.status === 409 && payload.code === "stale_version") {
        throw new StaleVersionError(response.status, payload);
      }
      throw new ServiceError(response.status, payload);
    }
    return (await response.json()) as T;
  }

  createSession(before: EnvDoc, after: EnvDoc, ontology?: unknown): Promise<SessionCreated> {
    return this.request("POST", "/v1/sessions", { before, after, ontology });
  }

  postAnswer(sessionId: string, version: number, answer: Answer): Promise<AnswerAccepted> {
    return this.request("POST", `/v1/sessions/${sessionId}/answers`, { version, answer });
  }

  transcript(sessionId: string): Promise<TranscriptDoc> {
    return this.request("GET", `/v1/sessions/${sessionId}`);
  }

  /** Canonical bytes of the completed variation, exactly as the CLI writes them. */
  async variationDocument(sessionId: string): Promise<string> {
    const response = await this.fetchImpl(`${this.baseUrl}/v1/sessions/${sessionId}/variation`);
    if (!response.ok) {
      throw new ServiceError(response.status, (await response.json()) as ErrorDoc);
    }
    return await response.text();
  }

  compare(env: EnvDoc, variation: VariationDoc, ontology?: unknown): Promise<EnvironmentComparisonDoc> {
    return this.request("POST", "/v1/compare", { env, variation, ontology });
  }

  plan(env: EnvDoc, variation: VariationDoc, ontology?: unknown): Promise<PlanResultDoc> {
    return this.request("POST", "/v1/plan", { env, variation, ontology });
  }

  execute(env: EnvDoc, plan: PlanDoc, variation?: VariationDoc, ontology?: unknown): Promise<TraceDoc> {
    return this.request("POST", "/v1/execute", { env, plan, variation, ontology });
  }
}
