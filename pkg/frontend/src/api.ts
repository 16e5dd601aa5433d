import type {
  CreateSessionResponse,
  DecisionJson,
  FixtureInfo,
  SessionJson,
} from "./types.js";

/** Error from the service (status > 0) or the network (status 0). */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(res: Response): Promise<ApiError> {
  let code = `http-${res.status}`;
  let message = res.statusText;
  try {
    const body = await res.json();
    if (body && typeof body === "object") {
      code = body.code ?? code;
      message = body.message ?? JSON.stringify(body);
    }
  } catch {
    /* non-JSON error body; keep the status text */
  }
  return new ApiError(res.status, code, message);
}

export class ConsoleApi {
  constructor(public readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let res: Response;
    try {
      res = await fetch(`${this.baseUrl}${path}`, {
        headers: { "content-type": "application/json" },
        ...init,
      });
    } catch (err) {
      throw new ApiError(0, "network", `service unreachable: ${err}`);
    }
    if (!res.ok) {
      throw await parseError(res);
    }
    return (await res.json()) as T;
  }

  listFixtures(): Promise<{ fixtures: FixtureInfo[] }> {
    return this.request("/fixtures");
  }

  createSession(body: {
    fixture?: string;
    program?: unknown;
    config?: Record<string, unknown>;
  }): Promise<CreateSessionResponse> {
    return this.request("/sessions", {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  getSession(id: string): Promise<SessionJson> {
    return this.request(`/sessions/${id}`);
  }

  submitDecision(id: string, decision: DecisionJson): Promise<{
    id: string;
    status: string;
  }> {
    return this.request(`/sessions/${id}/decision`, {
      method: "POST",
      body: JSON.stringify(decision),
    });
  }

  getTrace(id: string): Promise<Record<string, unknown>> {
    return this.request(`/sessions/${id}/trace`);
  }
}
