/**
 * Typed client for the search service. All search logic lives server-side;
 * this module only speaks the wire format.
 */

import type {
  RegisterResponse,
  SearchOptionsDto,
  SearchResponse,
  StatusResponse,
} from "./types.js";

/** Error carrying the server's {code, message} body. */
export class HttpError extends Error {
  constructor(
    public readonly code: number,
    message: string,
  ) {
    super(message);
    this.name = "HttpError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function parseError(response: Response): Promise<HttpError> {
  let message = response.statusText || `HTTP ${response.status}`;
  try {
    const body = (await response.json()) as { message?: string };
    if (body && typeof body.message === "string") {
      message = body.message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  return new HttpError(response.status, message);
}

export class ApiClient {
  private readonly base: string;

  constructor(
    baseUrl: string,
    private readonly fetchFn: FetchLike = (...args) => globalThis.fetch(...args),
  ) {
    this.base = baseUrl.replace(/\/$/, "");
  }

  private async requestJson<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.base}${path}`, init);
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.requestJson("/health");
  }

  register(source: string): Promise<RegisterResponse> {
    return this.requestJson("/repos", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ source }),
    });
  }

  status(repoId: string): Promise<StatusResponse> {
    return this.requestJson(`/repos/${encodeURIComponent(repoId)}/status`);
  }

  search(
    repoId: string,
    query: string,
    options: SearchOptionsDto = {},
    signal?: AbortSignal,
  ): Promise<SearchResponse> {
    return this.requestJson(`/repos/${encodeURIComponent(repoId)}/search`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ query, options }),
      signal,
    });
  }
}
