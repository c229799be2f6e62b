// Typed client for the semantic-space JSON API. The UI performs no vector
// math of its own: whatever the server returns is what gets rendered.

export interface NeighborEntry {
  term: string;
  similarity: number;
}

export interface NeighborList {
  query_term: string;
  subtracted_terms: string[];
  k: number;
  entries: NeighborEntry[];
  checksum: string;
}

export interface Cluster {
  label: string[];
  centroid_similarity: number;
  members: NeighborEntry[];
}

export interface ClusterSet {
  query_term: string;
  subtracted_terms: string[];
  clusters: Cluster[];
  checksum: string;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

async function getJson<T>(url: string, signal?: AbortSignal): Promise<T> {
  const resp = await fetch(url, { signal });
  if (!resp.ok) {
    let detail = `${resp.status} ${resp.statusText}`;
    try {
      const body = await resp.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  constructor(private readonly baseUrl: string) {}

  private url(path: string, params: Record<string, string | number>): string {
    const qs = new URLSearchParams();
    for (const [key, value] of Object.entries(params)) qs.set(key, String(value));
    return `${this.baseUrl}${path}?${qs.toString()}`;
  }

  async terms(prefix: string, limit = 20, signal?: AbortSignal): Promise<string[]> {
    const body = await getJson<{ terms: string[] }>(
      this.url("/terms", { prefix, limit }),
      signal,
    );
    return body.terms;
  }

  neighbors(
    term: string,
    k: number,
    minus: string[],
    signal?: AbortSignal,
  ): Promise<NeighborList> {
    return getJson<NeighborList>(
      this.url("/neighbors", { term, k, minus: minus.join(",") }),
      signal,
    );
  }

  clusters(term: string, minus: string[], signal?: AbortSignal): Promise<ClusterSet> {
    return getJson<ClusterSet>(
      this.url("/clusters", { term, minus: minus.join(",") }),
      signal,
    );
  }
}
