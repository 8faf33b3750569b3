// JSON shapes served by the backend API.

export type VoteValue = boolean | null;

export interface TopicView {
  id: string;
  full_name: string;
  display_name: string;
  aliases: string[];
  description: string;
  info_links: string[];
  origin: string;
  state: string;
  popularity_count: number;
}

export interface RelationTypeView {
  id: string;
  verb: string;
  definition: string;
  bidirectional: boolean;
  state: string;
}

export interface TallyView {
  relationship: string;
  true_count: number;
  false_count: number;
  null_count: number;
  resolution: string;
}

export interface RelationshipView {
  id: string;
  subject: string;
  subject_name: string;
  verb: string;
  verb_name: string;
  verb_definition: string;
  object: string;
  object_name: string;
  state: string;
  proposer: string;
  tally: TallyView;
}

export interface ContributorView {
  id: string;
  background: string;
  years_experience: number;
  verbs_read: string[];
  reliable: boolean;
  creator: boolean;
  votes_cast: number;
  topics_voted: string[];
  rocr: number | null;
  token?: string;
}

export interface RedundancyHit {
  topic: string;
  full_name: string;
  similarity: number;
}

export interface RedundancyReport {
  draft: string;
  threshold: number;
  redundancies: RedundancyHit[];
}

export interface VoteResponse {
  tally: TallyView;
  state: string;
}

export interface TopicCreated {
  topic: TopicView;
  redundancies: RedundancyHit[];
}

export interface RelationshipCreated {
  relationship: RelationshipView;
  resubmission_of_rejected: string[];
}

export interface CurationMetrics {
  sr: number;
  aartr: number;
  arocr: number;
}
