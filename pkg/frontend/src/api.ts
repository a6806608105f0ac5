/** Typed client for the survey collector's /v1 HTTP API. */

export type Stage = "consent" | "task1" | "task2" | "profile" | "done";

export interface SessionInfo {
  token: string;
  storyId: string;
  stage: Stage;
  characters: string[];
}

export interface SchemaDoc {
  task1: { min: number; max: number };
  task2: { min: number; max: number };
  academic_backgrounds: string[];
  stages: string[];
  profile: { age_min: number; age_max: number };
}

export interface Task1EntryPayload {
  pair: [string, string];
  importance: number;
  entry_order: number;
}

export interface Task2CellPayload {
  pair: [string, string];
  value: number;
}

export interface ProfilePayload {
  gender: string;
  age: number;
  education_level: string;
  academic_background: string;
  contact_email?: string;
}

export interface SubmitAck {
  accepted: boolean;
  stage: Stage;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: unknown,
  ) {
    super(`request failed with status ${status}`);
    this.name = "ApiError";
  }

  /** First human-readable message in the server's error detail, if any. */
  firstMessage(): string {
    if (typeof this.detail === "string") return this.detail;
    if (Array.isArray(this.detail) && this.detail.length > 0) {
      const first = this.detail[0] as { msg?: string };
      if (typeof first.msg === "string") return first.msg;
    }
    return this.message;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, init);
  if (!resp.ok) {
    let detail: unknown = null;
    try {
      detail = ((await resp.json()) as { detail?: unknown }).detail ?? null;
    } catch {
      // non-JSON error body; status alone has to do
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

function post<T>(url: string, body: unknown): Promise<T> {
  return request<T>(url, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
}

interface SessionDoc {
  token?: string;
  story_id: string;
  stage: Stage;
  characters: string[];
}

export class CollectorApi {
  constructor(private readonly baseUrl: string = "") {}

  async createSession(storyId: string): Promise<SessionInfo> {
    const doc = await post<SessionDoc>(`${this.baseUrl}/v1/sessions`, {
      story_id: storyId,
    });
    return {
      token: doc.token ?? "",
      storyId: doc.story_id,
      stage: doc.stage,
      characters: doc.characters,
    };
  }

  async getSession(token: string): Promise<SessionInfo> {
    const doc = await request<SessionDoc>(
      `${this.baseUrl}/v1/sessions/${encodeURIComponent(token)}`,
    );
    return {
      token,
      storyId: doc.story_id,
      stage: doc.stage,
      characters: doc.characters,
    };
  }

  getSchema(): Promise<SchemaDoc> {
    return request<SchemaDoc>(`${this.baseUrl}/v1/schema`);
  }

  private submit(token: string, stage: string, body: unknown): Promise<SubmitAck> {
    const url = `${this.baseUrl}/v1/sessions/${encodeURIComponent(token)}/${stage}`;
    return post<SubmitAck>(url, body);
  }

  submitConsent(token: string): Promise<SubmitAck> {
    return this.submit(token, "consent", { agreed: true });
  }

  submitTask1(token: string, entries: Task1EntryPayload[]): Promise<SubmitAck> {
    return this.submit(token, "task1", { entries });
  }

  submitTask2(token: string, cells: Task2CellPayload[]): Promise<SubmitAck> {
    return this.submit(token, "task2", { cells });
  }

  submitProfile(token: string, profile: ProfilePayload): Promise<SubmitAck> {
    return this.submit(token, "profile", profile);
  }
}
