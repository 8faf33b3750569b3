// Suggestion-form view model: propose a topic, relation type, or
// relationship. Topic names are checked for redundancy as the user types
// (debounced); while an unacknowledged warning at or above the threshold
// is showing, submission stays blocked.

import { ApiError, type Api } from "./api.js";
import type { RedundancyHit } from "./models.js";

export type EntityKind = "topic" | "relation-type" | "relationship";

export interface SuggestionReceipt {
  kind: EntityKind;
  id: string;
  state: string;
  resubmissionOfRejected?: string[];
}

export class SuggestionForm {
  fields: Record<string, string> = {};
  warnings: RedundancyHit[] = [];
  acknowledged = false;
  checking = false;
  error: string | null = null;
  receipt: SuggestionReceipt | null = null;

  private timer: ReturnType<typeof setTimeout> | null = null;
  private lastChecked = "";

  constructor(
    private api: Api,
    public kind: EntityKind,
    private options: { debounceMs?: number; threshold?: number } = {},
  ) {}

  get debounceMs(): number {
    return this.options.debounceMs ?? 300;
  }

  get blocked(): boolean {
    return this.warnings.length > 0 && !this.acknowledged;
  }

  setField(name: string, value: string): void {
    this.fields[name] = value;
    if (this.kind === "topic" && name === "full_name") {
      this.queueRedundancyCheck(value);
    }
  }

  private queueRedundancyCheck(draft: string): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.checkRedundancy(draft);
    }, this.debounceMs);
  }

  async checkRedundancy(draft: string): Promise<void> {
    const name = draft.trim();
    if (!name) {
      this.warnings = [];
      this.acknowledged = false;
      return;
    }
    this.checking = true;
    try {
      const report = await this.api.redundancies(name, this.options.threshold);
      this.checking = false;
      if (name !== (this.fields["full_name"] ?? name).trim()) {
        return; // the user typed past this check
      }
      const changed =
        report.redundancies.length !== this.warnings.length ||
        report.redundancies.some((hit, i) => this.warnings[i]?.topic !== hit.topic);
      this.warnings = report.redundancies;
      this.lastChecked = name;
      if (changed) {
        this.acknowledged = false; // new warnings need a fresh acknowledgment
      }
    } catch (error) {
      this.checking = false;
      this.error = error instanceof ApiError ? error.message : String(error);
    }
  }

  acknowledgeWarnings(): void {
    if (this.warnings.length > 0) {
      this.acknowledged = true;
    }
  }

  async submit(): Promise<SuggestionReceipt | null> {
    this.error = null;
    if (this.blocked) {
      this.error = "Acknowledge the redundancy warning or rename the entity first.";
      return null;
    }
    try {
      if (this.kind === "topic") {
        const created = await this.api.addTopic({
          full_name: (this.fields["full_name"] ?? "").trim(),
          display_name: this.fields["display_name"] ?? "",
          aliases: (this.fields["aliases"] ?? "")
            .split(",")
            .map((a) => a.trim())
            .filter(Boolean),
          description: this.fields["description"] ?? "",
        });
        this.receipt = { kind: this.kind, id: created.topic.id, state: created.topic.state };
      } else if (this.kind === "relation-type") {
        const created = await this.api.addRelationType({
          verb: (this.fields["verb"] ?? "").trim(),
          definition: this.fields["definition"] ?? "",
          bidirectional: this.fields["bidirectional"] === "true",
        });
        this.receipt = { kind: this.kind, id: created.id, state: created.state };
      } else {
        const created = await this.api.addRelationship({
          subject: (this.fields["subject"] ?? "").trim(),
          verb: (this.fields["verb"] ?? "").trim(),
          object: (this.fields["object"] ?? "").trim(),
        });
        this.receipt = {
          kind: this.kind,
          id: created.relationship.id,
          state: created.relationship.state,
          resubmissionOfRejected: created.resubmission_of_rejected,
        };
      }
      return this.receipt;
    } catch (error) {
      this.error = error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
      return null;
    }
  }
}
