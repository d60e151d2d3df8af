// Typed client for the curatrace HTTP JSON API. Every mutation in the UI
// goes through this module; nothing else constructs RDF or SPARQL.

import type {
  ApiErrorBody,
  ClassInfo,
  EntityPage,
  EntityView,
  SchemaResponse,
  SnapshotJson,
  StateItem,
  TimelineEntryJson,
  VersionView,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly body: ApiErrorBody | null;

  constructor(status: number, body: ApiErrorBody | null, fallback: string) {
    super(body?.message ?? fallback);
    this.status = status;
    this.body = body;
  }

  get violations() {
    return this.body?.violations ?? [];
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;
  curator: string | null = null;

  constructor(base = "", fetchFn: FetchLike = (input, init) => fetch(input, init)) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { Accept: "application/json" };
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.curator) headers["X-Curator"] = this.curator;
    let response: Response;
    try {
      response = await this.fetchFn(this.base + path, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (cause) {
      throw new ApiError(0, null, `network failure: ${String(cause)}`);
    }
    if (!response.ok) {
      let parsed: ApiErrorBody | null = null;
      try {
        parsed = (await response.json()) as ApiErrorBody;
      } catch {
        parsed = null;
      }
      throw new ApiError(response.status, parsed, `${method} ${path} -> ${response.status}`);
    }
    return (await response.json()) as T;
  }

  private entityPath(iri: string, suffix = ""): string {
    return `/api/entity/${encodeURIComponent(iri)}${suffix}`;
  }

  getSchema(): Promise<SchemaResponse> {
    return this.request("GET", "/api/schema");
  }

  getClasses(): Promise<ClassInfo[]> {
    return this.request("GET", "/api/classes");
  }

  getEntities(classIri: string, offset = 0, limit = 50): Promise<EntityPage> {
    const query = new URLSearchParams({
      class: classIri,
      offset: String(offset),
      limit: String(limit),
    });
    return this.request("GET", `/api/entities?${query}`);
  }

  getEntity(iri: string): Promise<EntityView> {
    return this.request("GET", this.entityPath(iri));
  }

  createEntity(classIri: string, state: StateItem[], iri?: string,
               primarySource?: string): Promise<SnapshotJson> {
    return this.request("POST", "/api/entity", {
      class: classIri,
      state,
      ...(iri ? { iri } : {}),
      ...(primarySource ? { primary_source: primarySource } : {}),
    });
  }

  submitEdit(iri: string, baseVersion: number, state: StateItem[],
             primarySource?: string): Promise<SnapshotJson> {
    return this.request("PUT", this.entityPath(iri), {
      base_version: baseVersion,
      state,
      ...(primarySource ? { primary_source: primarySource } : {}),
    });
  }

  deleteEntity(iri: string): Promise<SnapshotJson> {
    return this.request("DELETE", this.entityPath(iri));
  }

  getTimeline(iri: string): Promise<TimelineEntryJson[]> {
    return this.request("GET", this.entityPath(iri, "/timeline"));
  }

  getVersion(iri: string, n: number): Promise<VersionView> {
    return this.request("GET", this.entityPath(iri, `/version/${n}`));
  }

  restore(iri: string, n: number): Promise<SnapshotJson> {
    return this.request("POST", this.entityPath(iri, `/restore/${n}`));
  }
}
