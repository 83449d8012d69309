import type {
  CreateSessionRequest,
  HealthDoc,
  Label,
  LabelResultDoc,
  QueryStateDoc,
  SessionDoc,
  SessionMetricsDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** 409: the submitted query number is stale or a retrain is in flight. */
export class ConflictError extends ApiError {
  constructor(message: string) {
    super(409, message);
    this.name = "ConflictError";
  }
}

/** 410: the session spent its whole budget. */
export class SessionDoneError extends ApiError {
  constructor(message: string) {
    super(410, message);
    this.name = "SessionDoneError";
  }
}

async function errorDetail(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (typeof body?.detail === "string") return body.detail;
    return JSON.stringify(body);
  } catch {
    return response.statusText || `HTTP ${response.status}`;
  }
}

/** The service surface the UI consumes; `LabelServiceClient` is the
 * HTTP implementation, tests substitute in-memory fakes. */
export interface LabelServiceApi {
  health(): Promise<HealthDoc>;
  createSession(req: CreateSessionRequest): Promise<SessionDoc>;
  getQuery(sessionId: string): Promise<QueryStateDoc>;
  submitLabel(
    sessionId: string,
    queryNumber: number,
    label: Label,
  ): Promise<LabelResultDoc>;
  getMetrics(sessionId: string): Promise<SessionMetricsDoc>;
}

/**
 * Typed client for the labeling service. All state lives server-side;
 * this only shapes requests and classifies failures.
 */
export class LabelServiceClient implements LabelServiceApi {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      const detail = await errorDetail(response);
      if (response.status === 409) throw new ConflictError(detail);
      if (response.status === 410) throw new SessionDoneError(detail);
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  health(): Promise<HealthDoc> {
    return this.request("GET", "/health");
  }

  createSession(req: CreateSessionRequest): Promise<SessionDoc> {
    return this.request("POST", "/sessions", req);
  }

  getQuery(sessionId: string): Promise<QueryStateDoc> {
    return this.request("GET", `/sessions/${sessionId}/query`);
  }

  submitLabel(
    sessionId: string,
    queryNumber: number,
    label: Label,
  ): Promise<LabelResultDoc> {
    return this.request("POST", `/sessions/${sessionId}/label`, {
      query_number: queryNumber,
      label,
    });
  }

  getMetrics(sessionId: string): Promise<SessionMetricsDoc> {
    return this.request("GET", `/sessions/${sessionId}/metrics`);
  }
}
