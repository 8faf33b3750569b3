// In-memory Api double for view-model unit tests. Scenarios are scripted:
// votes resolve "accepted" once three up-votes accumulate, and errors can
// be injected for the next call.

import { ApiError, type Api } from "../src/api.js";
import type {
  ContributorView,
  CurationMetrics,
  RedundancyHit,
  RedundancyReport,
  RelationTypeView,
  RelationshipCreated,
  RelationshipView,
  TopicCreated,
  TopicView,
  VoteResponse,
  VoteValue,
} from "../src/models.js";

let sequence = 0;

export function makeRelationship(overrides: Partial<RelationshipView> = {}): RelationshipView {
  sequence += 1;
  const id = overrides.id ?? `r${sequence}`;
  return {
    id,
    subject: "t1",
    subject_name: "django",
    verb: "v1",
    verb_name: "is-a",
    verb_definition: "Places the subject under the general category named by the object.",
    object: "t2",
    object_name: "framework",
    state: "pending",
    proposer: "maintainer",
    tally: { relationship: id, true_count: 0, false_count: 0, null_count: 0, resolution: "open" },
    ...overrides,
  };
}

export function makeContributor(overrides: Partial<ContributorView> = {}): ContributorView {
  return {
    id: "alice",
    background: "industry",
    years_experience: 4,
    verbs_read: [],
    reliable: true,
    creator: false,
    votes_cast: 0,
    topics_voted: [],
    rocr: null,
    ...overrides,
  };
}

export class FakeApi implements Api {
  contributors = new Map<string, ContributorView>();
  // server-side state: cloned at every boundary, like real JSON transport
  relationshipViews = new Map<string, RelationshipView>();
  verbs: RelationTypeView[] = [
    { id: "v1", verb: "is-a", definition: "categorizes the subject", bidirectional: false, state: "accepted" },
  ];
  verbsRead = new Set<string>();
  redundancyHits: RedundancyHit[] = [];
  redundancyCalls: string[] = [];
  nextVoteError: ApiError | null = null;
  nextSubmitError: ApiError | null = null;
  voteLog: Array<{ relationship: string; value: VoteValue }> = [];

  addPending(view: RelationshipView): void {
    this.relationshipViews.set(view.id, structuredClone(view));
  }

  async register(id: string, background: string, years: number): Promise<ContributorView> {
    const record = makeContributor({ id, background, years_experience: years });
    this.contributors.set(id, record);
    return record;
  }

  async contributor(id: string): Promise<ContributorView> {
    const record = this.contributors.get(id);
    if (!record) {
      throw new ApiError(404, "UnknownContributor", `no such contributor: ${id}`);
    }
    return record;
  }

  async relationTypes(): Promise<RelationTypeView[]> {
    return this.verbs;
  }

  async markVerbRead(verbId: string): Promise<void> {
    this.verbsRead.add(verbId);
  }

  async relationships(state?: string): Promise<RelationshipView[]> {
    return [...this.relationshipViews.values()]
      .filter((r) => !state || r.state === state)
      .map((r) => structuredClone(r));
  }

  async relationship(id: string): Promise<RelationshipView> {
    const view = this.relationshipViews.get(id);
    if (!view) {
      throw new ApiError(404, "UnknownRelationship", `no such relationship: ${id}`);
    }
    return structuredClone(view);
  }

  private serverState(id: string): RelationshipView {
    const view = this.relationshipViews.get(id);
    if (!view) {
      throw new ApiError(404, "UnknownRelationship", `no such relationship: ${id}`);
    }
    return view;
  }

  async vote(relationshipId: string, value: VoteValue): Promise<VoteResponse> {
    if (this.nextVoteError) {
      const error = this.nextVoteError;
      this.nextVoteError = null;
      throw error;
    }
    const view = this.serverState(relationshipId);
    if (view.state !== "pending") {
      throw new ApiError(409, "AlreadyResolved", `relationship ${relationshipId} is ${view.state}`);
    }
    if (value === true) view.tally.true_count += 1;
    else if (value === false) view.tally.false_count += 1;
    else view.tally.null_count += 1;
    if (view.tally.true_count >= 3 && view.tally.false_count === 0) {
      view.state = "accepted";
      view.tally.resolution = "accepted";
    }
    this.voteLog.push({ relationship: relationshipId, value });
    return { tally: { ...view.tally }, state: view.state };
  }

  async addTopic(body: { full_name: string }): Promise<TopicCreated> {
    if (this.nextSubmitError) {
      const error = this.nextSubmitError;
      this.nextSubmitError = null;
      throw error;
    }
    sequence += 1;
    const topic: TopicView = {
      id: `t${sequence}`,
      full_name: body.full_name,
      display_name: body.full_name,
      aliases: [],
      description: "",
      info_links: [],
      origin: "contributor",
      state: "pending",
      popularity_count: 0,
    };
    return { topic, redundancies: this.redundancyHits };
  }

  async addRelationType(body: { verb: string }): Promise<RelationTypeView> {
    sequence += 1;
    const verb: RelationTypeView = {
      id: `v${sequence}`,
      verb: body.verb,
      definition: "",
      bidirectional: false,
      state: "pending",
    };
    this.verbs.push(verb);
    return verb;
  }

  async addRelationship(body: {
    subject: string;
    verb: string;
    object: string;
  }): Promise<RelationshipCreated> {
    const view = makeRelationship({ subject: body.subject, verb: body.verb, object: body.object });
    this.addPending(view);
    return { relationship: view, resubmission_of_rejected: [] };
  }

  async topic(idOrName: string): Promise<TopicView> {
    throw new ApiError(404, "UnknownTopic", `no such topic: ${idOrName}`);
  }

  async redundancies(draft: string): Promise<RedundancyReport> {
    this.redundancyCalls.push(draft);
    return { draft, threshold: 0.8, redundancies: this.redundancyHits };
  }

  async metrics(): Promise<CurationMetrics> {
    return { sr: 1, aartr: 1, arocr: 1 };
  }
}
