// Dashboard state: the contributor's review queue, contribution summary,
// and permission gates.

import type { Api } from "./api.js";
import type { ContributorView, RelationTypeView } from "./models.js";
import { ReviewCard } from "./review.js";

export const CREATOR_RULE =
  "Creator permissions unlock after reading every verb definition and voting on 50 relationships involving 20 topics.";

export class Dashboard {
  contributor: ContributorView | null = null;
  verbs: RelationTypeView[] = [];
  queue: ReviewCard[] = [];
  interestFilter = "";
  loadError: string | null = null;

  constructor(private api: Api) {}

  async load(contributorId: string): Promise<void> {
    this.loadError = null;
    try {
      this.contributor = await this.api.contributor(contributorId);
      this.verbs = await this.api.relationTypes();
      const pending = await this.api.relationships("pending");
      const verbsRead = new Set(this.contributor.verbs_read);
      this.queue = pending.map((view) => new ReviewCard(this.api, view, verbsRead));
    } catch (error) {
      this.loadError = error instanceof Error ? error.message : String(error);
      throw error;
    }
  }

  get readOnly(): boolean {
    return this.contributor !== null && !this.contributor.reliable;
  }

  get canSuggest(): boolean {
    return this.contributor?.creator ?? false;
  }

  get suggestLockedReason(): string | null {
    if (this.canSuggest) {
      return null;
    }
    return CREATOR_RULE;
  }

  get visibleQueue(): ReviewCard[] {
    const needle = this.interestFilter.trim().toLowerCase();
    const open: ReviewCard[] = [];
    const skipped: ReviewCard[] = [];
    for (const card of this.queue) {
      // cards resolved by the contributor's own vote stay visible with
      // their outcome; cards retired by a conflicting resolution vanish
      if (card.status === "retired") {
        continue;
      }
      if (
        needle &&
        !card.view.subject_name.includes(needle) &&
        !card.view.object_name.includes(needle)
      ) {
        continue;
      }
      (card.status === "skipped" ? skipped : open).push(card);
    }
    return [...open, ...skipped]; // skipped cards defer to the back
  }

  get emptyState(): boolean {
    return this.visibleQueue.length === 0;
  }

  get contributionSummary(): string {
    if (!this.contributor) {
      return "";
    }
    const c = this.contributor;
    const conformance = c.rocr === null ? "n/a" : `${(c.rocr * 100).toFixed(0)}%`;
    return `${c.votes_cast} relationships voted across ${c.topics_voted.length} topics; conformance ${conformance}`;
  }

  async refreshContributor(): Promise<void> {
    if (this.contributor) {
      this.contributor = await this.api.contributor(this.contributor.id);
    }
  }
}
