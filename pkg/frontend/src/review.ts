// Review-card view model: one relationship under evaluation.
//
// Vote controls stay disabled until the contributor has read the verb
// definition (the server re-validates). Votes update the tally
// optimistically and reconcile with the server's response; a vote landing
// on a just-resolved relationship surfaces the conflict and retires the
// card instead of swallowing it.

import { ApiError, type Api } from "./api.js";
import type { RelationshipView, VoteValue } from "./models.js";

export type CardStatus = "open" | "resolved" | "skipped" | "retired";

export class ReviewCard {
  verbRead: boolean;
  status: CardStatus = "open";
  message: string | null = null;
  myVote: VoteValue | undefined;

  constructor(
    private api: Api,
    public view: RelationshipView,
    verbsAlreadyRead: ReadonlySet<string> = new Set(),
  ) {
    this.verbRead = verbsAlreadyRead.has(view.verb);
    if (view.state !== "pending") {
      this.status = "resolved";
    }
  }

  get canVote(): boolean {
    return this.verbRead && this.status === "open";
  }

  get tallySummary(): string {
    const t = this.view.tally;
    return `${t.true_count} up / ${t.false_count} down / ${t.null_count} unsure`;
  }

  get triple(): string {
    return `${this.view.subject_name} — ${this.view.verb_name} → ${this.view.object_name}`;
  }

  async markVerbRead(): Promise<void> {
    if (this.verbRead) {
      return;
    }
    await this.api.markVerbRead(this.view.verb);
    this.verbRead = true;
  }

  async vote(value: VoteValue): Promise<void> {
    if (!this.canVote) {
      this.message = this.verbRead
        ? "This relationship is no longer open."
        : "Read the verb definition before voting.";
      return;
    }
    const tally = this.view.tally;
    const before = { ...tally };
    // optimistic: show the vote immediately, reconcile below
    if (this.myVote !== undefined) {
      if (this.myVote === true) tally.true_count -= 1;
      else if (this.myVote === false) tally.false_count -= 1;
      else tally.null_count -= 1;
    }
    if (value === true) tally.true_count += 1;
    else if (value === false) tally.false_count += 1;
    else tally.null_count += 1;

    try {
      const result = await this.api.vote(this.view.id, value);
      this.view.tally = result.tally;
      this.view.state = result.state;
      this.myVote = value;
      this.message = null;
      if (result.state !== "pending") {
        this.status = "resolved";
        this.message = `Resolved: ${result.state}.`;
      }
    } catch (error) {
      this.view.tally = before;
      if (error instanceof ApiError && error.code === "AlreadyResolved") {
        this.status = "retired";
        this.message = "Another contributor's vote just resolved this relationship.";
        return;
      }
      if (error instanceof ApiError) {
        this.message = error.message;
        if (error.code === "NotReliable") {
          this.status = "retired";
        }
        return;
      }
      throw error;
    }
  }

  skip(): void {
    if (this.status === "open") {
      this.status = "skipped";
      this.message = null;
    }
  }

  unskip(): void {
    if (this.status === "skipped") {
      this.status = "open";
    }
  }
}
