/** Thin fetch client for the annotation service. */

import type {
  AssignmentLabelValue,
  NuggetSubmission,
  TaskPayload,
  TaskSummary,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: unknown,
  ) {
    super(`request failed (${status}): ${JSON.stringify(detail)}`);
  }
}

async function parseDetail(response: Response): Promise<unknown> {
  try {
    const body = await response.json();
    return (body as { detail?: unknown }).detail ?? body;
  } catch {
    return response.statusText;
  }
}

export class AnnotationApi {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      throw new ApiError(response.status, await parseDetail(response));
    }
    return (await response.json()) as T;
  }

  listTasks(filters: {
    assessor?: string;
    kind?: string;
    status?: string;
  } = {}): Promise<TaskSummary[]> {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(filters)) {
      if (value) params.set(key, value);
    }
    const query = params.toString();
    return this.request<TaskSummary[]>(`/tasks${query ? `?${query}` : ""}`);
  }

  getTask(taskId: string): Promise<TaskPayload> {
    return this.request<TaskPayload>(`/tasks/${encodeURIComponent(taskId)}`);
  }

  putNuggets(
    taskId: string,
    assessorId: string,
    nuggets: NuggetSubmission[],
  ): Promise<{ task_id: string; version: number }> {
    return this.request(`/tasks/${encodeURIComponent(taskId)}/nuggets`, {
      method: "PUT",
      body: JSON.stringify({ assessor_id: assessorId, nuggets }),
    });
  }

  putAssignment(
    taskId: string,
    assessorId: string,
    labels: AssignmentLabelValue[],
  ): Promise<{ task_id: string; version: number }> {
    return this.request(`/tasks/${encodeURIComponent(taskId)}/assignment`, {
      method: "PUT",
      body: JSON.stringify({ assessor_id: assessorId, labels }),
    });
  }
}
