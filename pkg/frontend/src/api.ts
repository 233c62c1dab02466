/** Thin typed client over the JSON API. The fetch implementation is
 * injectable so flows can be exercised against a fake backend. */

import type {
  ApiErrorBody,
  ConfigPayload,
  ResultDetailPayload,
  ResultListPayload,
  SessionPayload,
  StatusPayload,
  TeacherPayload,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface ApiResult<T> {
  status: number;
  body: T | ApiErrorBody;
}

export function isApiError(body: unknown): body is ApiErrorBody {
  return typeof body === "object" && body !== null && "error" in (body as object);
}

export class ApiClient {
  private token: string | null = null;

  constructor(private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init)) {}

  get authenticated(): boolean {
    return this.token !== null;
  }

  logout(): void {
    this.token = null;
  }

  private async request<T>(
    method: string,
    url: string,
    payload?: unknown,
    withToken = false,
  ): Promise<ApiResult<T>> {
    const headers: Record<string, string> = {};
    if (payload !== undefined) headers["Content-Type"] = "application/json";
    if (withToken && this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchImpl(url, {
      method,
      headers,
      body: payload === undefined ? undefined : JSON.stringify(payload),
    });
    return { status: response.status, body: (await response.json()) as T | ApiErrorBody };
  }

  // student plane -----------------------------------------------------------

  openSession(): Promise<ApiResult<SessionPayload>> {
    return this.request("GET", "/api/session");
  }

  submitAnswer(questionIndex: number, value: number | null): Promise<ApiResult<SessionPayload>> {
    return this.request("POST", "/api/session/answer", {
      question_index: questionIndex,
      value,
    });
  }

  resetDemo(): Promise<ApiResult<{ state: string; deleted_answers: number }>> {
    return this.request("POST", "/api/session/reset", {});
  }

  // admin plane -------------------------------------------------------------

  async login(username: string, password: string): Promise<ApiResult<{ token: string }>> {
    const result = await this.request<{ token: string }>("POST", "/api/admin/login", {
      username,
      password,
    });
    if (result.status === 200 && !isApiError(result.body)) {
      this.token = result.body.token;
    }
    return result;
  }

  status(): Promise<ApiResult<StatusPayload>> {
    return this.request("GET", "/api/admin/status", undefined, true);
  }

  getConfig(): Promise<ApiResult<ConfigPayload>> {
    return this.request("GET", "/api/admin/config", undefined, true);
  }

  updateConfig(update: Partial<ConfigPayload>): Promise<ApiResult<ConfigPayload>> {
    return this.request("PUT", "/api/admin/config", update, true);
  }

  listTeachers(): Promise<ApiResult<{ teachers: TeacherPayload[] }>> {
    return this.request("GET", "/api/admin/teachers", undefined, true);
  }

  upsertTeacher(teacher: TeacherPayload): Promise<ApiResult<TeacherPayload>> {
    return this.request("POST", "/api/admin/teachers", teacher, true);
  }

  removeTeacher(id: string): Promise<ApiResult<{ removed: string }>> {
    return this.request("DELETE", `/api/admin/teachers/${encodeURIComponent(id)}`, undefined, true);
  }

  // results plane -----------------------------------------------------------

  results(includeDemo: boolean, teacher?: string): Promise<ApiResult<ResultListPayload>> {
    const params = new URLSearchParams({ include_demo: String(includeDemo) });
    if (teacher) params.set("teacher", teacher);
    return this.request("GET", `/api/results?${params}`, undefined, true);
  }

  resultDetail(questionnaireNo: number): Promise<ApiResult<ResultDetailPayload>> {
    return this.request("GET", `/api/results/${questionnaireNo}`, undefined, true);
  }
}

export function errorMessage(body: ApiErrorBody | unknown): string {
  if (isApiError(body)) return body.error.message;
  return "unexpected response";
}
