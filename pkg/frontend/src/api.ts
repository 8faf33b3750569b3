// Typed client for the curation/recommendation HTTP API. Every UI action
// maps to exactly one of these calls; server rejections surface as ApiError
// with the backend's error code, never swallowed.

import type {
  ContributorView,
  CurationMetrics,
  RedundancyReport,
  RelationTypeView,
  RelationshipCreated,
  RelationshipView,
  TopicCreated,
  TopicView,
  VoteResponse,
  VoteValue,
} from "./models.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export interface Api {
  register(id: string, background: string, yearsExperience: number): Promise<ContributorView>;
  contributor(id: string): Promise<ContributorView>;
  relationTypes(): Promise<RelationTypeView[]>;
  markVerbRead(verbId: string): Promise<void>;
  relationships(state?: string): Promise<RelationshipView[]>;
  relationship(id: string): Promise<RelationshipView>;
  vote(relationshipId: string, value: VoteValue): Promise<VoteResponse>;
  addTopic(body: {
    full_name: string;
    display_name?: string;
    aliases?: string[];
    description?: string;
  }): Promise<TopicCreated>;
  addRelationType(body: {
    verb: string;
    definition?: string;
    bidirectional?: boolean;
  }): Promise<RelationTypeView>;
  addRelationship(body: {
    subject: string;
    verb: string;
    object: string;
  }): Promise<RelationshipCreated>;
  topic(idOrName: string): Promise<TopicView>;
  redundancies(draft: string, threshold?: number): Promise<RedundancyReport>;
  metrics(): Promise<CurationMetrics>;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient implements Api {
  private token: string | null = null;

  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) {
      headers["Authorization"] = `Bearer ${this.token}`;
    }
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let code = `http-${response.status}`;
      let detail = response.statusText;
      try {
        const payload = (await response.json()) as { error?: string; detail?: string };
        code = payload.error ?? code;
        detail = payload.detail ?? detail;
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(response.status, code, detail);
    }
    if (response.status === 204) {
      return undefined as T;
    }
    return (await response.json()) as T;
  }

  register(id: string, background: string, yearsExperience: number): Promise<ContributorView> {
    return this.request("POST", "/contributors", {
      id,
      background,
      years_experience: yearsExperience,
    });
  }

  contributor(id: string): Promise<ContributorView> {
    return this.request("GET", `/contributors/${encodeURIComponent(id)}`);
  }

  relationTypes(): Promise<RelationTypeView[]> {
    return this.request("GET", "/relation-types");
  }

  async markVerbRead(verbId: string): Promise<void> {
    await this.request("POST", `/relation-types/${encodeURIComponent(verbId)}/read`);
  }

  relationships(state?: string): Promise<RelationshipView[]> {
    const query = state ? `?state=${encodeURIComponent(state)}` : "";
    return this.request("GET", `/relationships${query}`);
  }

  relationship(id: string): Promise<RelationshipView> {
    return this.request("GET", `/relationships/${encodeURIComponent(id)}`);
  }

  vote(relationshipId: string, value: VoteValue): Promise<VoteResponse> {
    return this.request("POST", `/relationships/${encodeURIComponent(relationshipId)}/votes`, {
      value,
    });
  }

  addTopic(body: {
    full_name: string;
    display_name?: string;
    aliases?: string[];
    description?: string;
  }): Promise<TopicCreated> {
    return this.request("POST", "/topics", body);
  }

  addRelationType(body: {
    verb: string;
    definition?: string;
    bidirectional?: boolean;
  }): Promise<RelationTypeView> {
    return this.request("POST", "/relation-types", body);
  }

  addRelationship(body: {
    subject: string;
    verb: string;
    object: string;
  }): Promise<RelationshipCreated> {
    return this.request("POST", "/relationships", body);
  }

  topic(idOrName: string): Promise<TopicView> {
    return this.request("GET", `/topics/${encodeURIComponent(idOrName)}`);
  }

  redundancies(draft: string, threshold?: number): Promise<RedundancyReport> {
    const query = threshold !== undefined ? `?threshold=${threshold}` : "";
    return this.request(
      "GET",
      `/topics/${encodeURIComponent(draft)}/redundancies${query}`,
    );
  }

  metrics(): Promise<CurationMetrics> {
    return this.request("GET", "/metrics/curation");
  }
}
