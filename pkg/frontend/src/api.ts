// Thin typed client over the analytics API plus a latest-wins request guard.

import type {
  ApiErrorPayload,
  ComparePayload,
  CubeListPayload,
  MetadataPayload,
  QueryPayload,
} from "./types.js";

export interface FetchResponse {
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<FetchResponse>;

export class ApiRequestError extends Error {
  constructor(
    public readonly status: number,
    public readonly payload: ApiErrorPayload,
  ) {
    super(payload.message ?? payload.error ?? `HTTP ${status}`);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  setBaseUrl(url: string): void {
    this.baseUrl = url.replace(/\/+$/, "");
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const body = (await response.json()) as T | ApiErrorPayload;
    if (response.status >= 400) {
      throw new ApiRequestError(response.status, body as ApiErrorPayload);
    }
    return body as T;
  }

  listCubes(): Promise<CubeListPayload> {
    return this.request("/cubes");
  }

  metadata(cube: string): Promise<MetadataPayload> {
    return this.request(`/cubes/${encodeURIComponent(cube)}/metadata`);
  }

  query(cube: string, cql: string): Promise<QueryPayload> {
    return this.request(`/cubes/${encodeURIComponent(cube)}/query`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ cql }),
    });
  }

  chartCompare(cube: string, left: string, right: string, axis: string): Promise<ComparePayload> {
    const params = new URLSearchParams({ left, right, axis });
    return this.request(`/cubes/${encodeURIComponent(cube)}/chart/compare?${params}`);
  }

  uploadDataset(files: Record<string, string>, name?: string): Promise<{ cube_id: string }> {
    return this.request("/datasets", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(name ? { files, name } : { files }),
    });
  }
}

/**
 * At most one live request per panel: responses that were superseded while in
 * flight resolve to null instead of clobbering newer results.
 */
export class LatestOnly<T> {
  private seq = 0;

  async run(work: () => Promise<T>): Promise<T | null> {
    const ticket = ++this.seq;
    const result = await work();
    return ticket === this.seq ? result : null;
  }
}
