// REST client for the session service. Every server interaction in the app
// goes through this class, and each request is appended to `log`, so tests
// can assert the UI never talks to anything but the documented endpoints.

import type {
  ActivateResponse,
  DeleteResponse,
  GraphView,
  NodeMutationResponse,
  SessionDoc,
  SparkView,
  TransformResponse,
  TurnResponse,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface RequestRecord {
  method: string;
  path: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly errorCode: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  readonly log: RequestRecord[] = [];

  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    this.log.push({ method, path });
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { 'Content-Type': 'application/json' };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.base + path, init);
    const text = await response.text();
    const data = text ? JSON.parse(text) : {};
    if (!response.ok) {
      throw new ApiError(
        response.status,
        data.error_code ?? 'error',
        data.message ?? response.statusText,
      );
    }
    return data as T;
  }

  health(): Promise<{ status: string }> {
    return this.request('GET', '/health');
  }

  createSession(settings?: Record<string, unknown>): Promise<SessionDoc> {
    return this.request('POST', '/sessions', settings ? { settings } : {});
  }

  getSession(sessionId: string): Promise<SessionDoc> {
    return this.request('GET', `/sessions/${sessionId}`);
  }

  getGraph(sessionId: string): Promise<GraphView> {
    return this.request('GET', `/sessions/${sessionId}/graph`);
  }

  postTurn(sessionId: string, mode: string, prompt: string): Promise<TurnResponse> {
    return this.request('POST', `/sessions/${sessionId}/turns`, { mode, prompt });
  }

  collect(sessionId: string, code: string, title: string): Promise<NodeMutationResponse> {
    return this.request('POST', `/sessions/${sessionId}/collect`, { code, title });
  }

  activate(sessionId: string, nodeId: string): Promise<ActivateResponse> {
    return this.request('POST', `/sessions/${sessionId}/nodes/${nodeId}/activate`);
  }

  duplicate(sessionId: string, nodeId: string): Promise<NodeMutationResponse> {
    return this.request('POST', `/sessions/${sessionId}/nodes/${nodeId}/duplicate`);
  }

  deleteNode(sessionId: string, nodeId: string, recursive: boolean): Promise<DeleteResponse> {
    return this.request(
      'DELETE',
      `/sessions/${sessionId}/nodes/${nodeId}?recursive=${recursive}`,
    );
  }

  modify(sessionId: string, nodeId: string, instruction: string): Promise<TransformResponse> {
    return this.request('POST', `/sessions/${sessionId}/nodes/${nodeId}/modify`, {
      instruction,
    });
  }

  applySpark(sessionId: string, nodeId: string, sparkId: string): Promise<TransformResponse> {
    return this.request('POST', `/sessions/${sessionId}/nodes/${nodeId}/modify`, {
      spark_id: sparkId,
    });
  }

  merge(
    sessionId: string,
    a: string,
    b: string,
    instruction: string,
  ): Promise<TransformResponse> {
    return this.request('POST', `/sessions/${sessionId}/merge`, { a, b, instruction });
  }

  sparks(): Promise<{ sparks: SparkView[] }> {
    return this.request('GET', '/sparks');
  }
}
