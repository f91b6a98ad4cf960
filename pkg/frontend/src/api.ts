/** Thin typed client for the session service. All data shown in the UI
 * comes back through these calls; nothing is computed client-side. */

import type {
  PlanRecord,
  Query,
  SessionConfig,
  SessionHandle,
  TurnBody,
  TurnResult,
} from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(readonly status: number, readonly detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = 'ApiError';
  }
}

async function parseDetail(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (typeof body?.detail === 'string') return body.detail;
    return JSON.stringify(body?.detail ?? body);
  } catch {
    return response.statusText || 'request failed';
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await parseDetail(response));
    }
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  createSession(query: Query, config?: Partial<SessionConfig>): Promise<SessionHandle> {
    const body: Record<string, unknown> = { query };
    if (config) body.config = config;
    return this.request<SessionHandle>('POST', '/sessions', body);
  }

  postTurn(sessionId: string, body: TurnBody): Promise<TurnResult> {
    return this.request<TurnResult>('POST', `/sessions/${sessionId}/turns`, body);
  }

  getPlan(sessionId: string): Promise<PlanRecord> {
    return this.request<PlanRecord>('GET', `/sessions/${sessionId}/plan`);
  }

  getTrace(sessionId: string): Promise<{ lines: string[] }> {
    return this.request<{ lines: string[] }>('GET', `/sessions/${sessionId}/trace`);
  }

  getConstraints(sessionId: string): Promise<{ lines: string[] }> {
    return this.request<{ lines: string[] }>('GET', `/sessions/${sessionId}/constraints`);
  }

  deleteSession(sessionId: string): Promise<void> {
    return this.request<void>('DELETE', `/sessions/${sessionId}`);
  }
}
