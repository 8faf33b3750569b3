"""Crowd curation: votes, graduated acceptance, contributor reliability.

A relationship's label is decided by inter-rater agreement. Votes arrive
one at a time; after each non-null vote the acceptance rule is evaluated
on the live vote sequence, and the first terminal verdict sticks (further
votes are refused). Nullifying a contributor's votes replays the remaining
sequence, which can reopen or flip previously resolved relationships.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import store
from .errors import (
    AlreadyResolved,
    EmptyInput,
    NotReliable,
    UnknownContributor,
    VerbUnread,
)

OPEN = "open"
ACCEPTED = "accepted"
REJECTED = "rejected"

# relationship store state <-> tally resolution
_STATE_FOR_RESOLUTION = {OPEN: store.PENDING, ACCEPTED: store.ACCEPTED, REJECTED: store.REJECTED}
_RESOLUTION_FOR_STATE = {v: k for k, v in _STATE_FOR_RESOLUTION.items()}


@dataclass
class Vote:
    contributor: str
    relationship: str
    value: bool | None  # None is a declared "don't know"; never counts
    ordinal: int
    superseded: bool = False
    nullified: bool = False

    @property
    def live(self) -> bool:
        return not self.superseded and not self.nullified


@dataclass
class CurationTally:
    relationship: str
    true_count: int = 0
    false_count: int = 0
    null_count: int = 0
    resolution: str = OPEN


@dataclass
class ContributorRecord:
    id: str
    background: str = "industry"  # academia | industry
    years_experience: float = 0.0
    verbs_read: set[str] = field(default_factory=set)
    reliable: bool = True
    creator: bool = False


@dataclass(frozen=True)
class AcceptancePolicy:
    min_votes: int = 3
    max_votes: int = 9
    start_threshold: float = 1.00
    floor_threshold: float = 0.65
    reliability_floor: float = 0.50

    def threshold(self, n_votes: int) -> float:
        """Acceptance ratio required at n non-null votes.

        Starts at start_threshold when the minimum quorum is reached and
        declines linearly to floor_threshold at max_votes, never below.
        """
        if n_votes >= self.max_votes or self.max_votes == self.min_votes:
            return self.floor_threshold
        span = self.start_threshold - self.floor_threshold
        frac = (n_votes - self.min_votes) / (self.max_votes - self.min_votes)
        return max(self.floor_threshold, self.start_threshold - span * frac)


def walk_resolution(values: Sequence[bool], policy: AcceptancePolicy) -> str:
    """Resolution reached by a chronological sequence of non-null votes.

    After each vote, once the quorum is met: accept when the true ratio
    meets the current threshold; reject when the floor has become
    unreachable even if every remaining vote up to max_votes were true,
    or when max_votes is reached below the floor. Entries after the first
    terminal verdict are ignored.
    """
    trues = 0
    for n, value in enumerate(values, start=1):
        if value:
            trues += 1
        if n < policy.min_votes:
            continue
        if trues / n >= policy.threshold(n):
            return ACCEPTED
        best_possible = (trues + max(policy.max_votes - n, 0)) / policy.max_votes
        if best_possible < policy.floor_threshold:
            return REJECTED
        if n >= policy.max_votes and trues / n < policy.floor_threshold:
            return REJECTED
    return OPEN


def eligible_profile(background: str, years_experience: float) -> bool:
    """Contribution requires 3+ years academic or 1+ year industrial experience."""
    if background == "academia":
        return years_experience >= 3
    if background == "industry":
        return years_experience >= 1
    return False


class CurationEngine:
    """Vote collection and acceptance over a KnowledgeGraph.

    Owns the vote ledgers, contributor registry, and the append-only audit
    trail of {vote, resolution-change, revocation, grant, ...} events.
    """

    def __init__(self, graph: store.KnowledgeGraph | None = None, policy: AcceptancePolicy | None = None):
        self.graph = graph if graph is not None else store.KnowledgeGraph()
        self.policy = policy or AcceptancePolicy()
        self.votes: dict[str, list[Vote]] = {}
        self.contributors: dict[str, ContributorRecord] = {}
        self.events: list[dict] = []
        self._ordinal = 0

    # -- plumbing -----------------------------------------------------------

    def _next_ordinal(self) -> int:
        self._ordinal += 1
        return self._ordinal

    def _emit(self, event: str, **payload) -> None:
        self.events.append({"ordinal": self._next_ordinal(), "event": event, **payload})

    def require_contributor(self, contributor_id: str) -> ContributorRecord:
        try:
            return self.contributors[contributor_id]
        except KeyError:
            raise UnknownContributor(f"no such contributor: {contributor_id}") from None

    # -- entity intake (graph ops + audit) -----------------------------------

    def register_contributor(
        self, contributor_id: str, background: str = "industry", years_experience: float = 1.0
    ) -> ContributorRecord:
        if contributor_id in self.contributors:
            return self.contributors[contributor_id]
        if not eligible_profile(background, years_experience):
            raise NotReliable(
                "profile below experience requirements (3y academia or 1y industry)"
            )
        record = ContributorRecord(
            id=contributor_id, background=background, years_experience=years_experience
        )
        self.contributors[contributor_id] = record
        self._emit("contributor-registered", contributor=contributor_id)
        return record

    def mark_verb_read(self, contributor_id: str, verb_id: str) -> None:
        record = self.require_contributor(contributor_id)
        self.graph.require_verb(verb_id)
        if verb_id not in record.verbs_read:
            record.verbs_read.add(verb_id)
            self._emit("verb-read", contributor=contributor_id, verb=verb_id)

    def add_topic(self, *args, **kwargs) -> store.Topic:
        topic = self.graph.add_topic(*args, **kwargs)
        self._emit("topic-added", topic=topic.id, full_name=topic.full_name, state=topic.state)
        return topic

    def add_relation_type(self, *args, **kwargs) -> store.RelationType:
        rt = self.graph.add_relation_type(*args, **kwargs)
        self._emit("verb-added", verb=rt.id, name=rt.verb)
        return rt

    def add_relationship(self, *args, **kwargs) -> store.Relationship:
        rel = self.graph.add_relationship(*args, **kwargs)
        self.votes.setdefault(rel.id, [])
        self._emit(
            "relationship-added",
            relationship=rel.id,
            subject=rel.subject,
            verb=rel.verb,
            object=rel.object,
        )
        return rel

    # -- voting ------------------------------------------------------------

    def live_votes(self, rel_id: str) -> list[Vote]:
        return [v for v in self.votes.get(rel_id, ()) if v.live]

    def tally(self, rel_id: str) -> CurationTally:
        rel = self.graph.require_relationship(rel_id)
        counts = CurationTally(relationship=rel_id, resolution=_RESOLUTION_FOR_STATE[rel.state])
        for vote in self.live_votes(rel_id):
            if vote.value is True:
                counts.true_count += 1
            elif vote.value is False:
                counts.false_count += 1
            else:
                counts.null_count += 1
        return counts

    def cast_vote(self, contributor_id: str, rel_id: str, value: bool | None) -> CurationTally:
        record = self.require_contributor(contributor_id)
        if not record.reliable:
            raise NotReliable(f"contributor {contributor_id} is not reliable")
        rel = self.graph.require_relationship(rel_id)
        if rel.state != store.PENDING:
            raise AlreadyResolved(f"relationship {rel_id} is {rel.state}")
        if rel.verb not in record.verbs_read:
            raise VerbUnread(f"verb {rel.verb} not marked read by {contributor_id}")
        for prior in self.votes[rel_id]:
            if prior.live and prior.contributor == contributor_id:
                prior.superseded = True
        vote = Vote(
            contributor=contributor_id,
            relationship=rel_id,
            value=value,
            ordinal=self._next_ordinal(),
        )
        self.votes[rel_id].append(vote)
        self._emit("vote", contributor=contributor_id, relationship=rel_id, value=value)
        self._resolve(rel_id)
        return self.tally(rel_id)

    def _resolve(self, rel_id: str) -> str:
        rel = self.graph.require_relationship(rel_id)
        seq = [v.value for v in self.live_votes(rel_id) if v.value is not None]
        resolution = walk_resolution(seq, self.policy)
        current = _RESOLUTION_FOR_STATE[rel.state]
        if resolution != current:
            self.graph.set_relationship_state(rel_id, _STATE_FOR_RESOLUTION[resolution])
            self._emit("resolution-change", relationship=rel_id, was=current, now=resolution)
        return resolution

    # -- reliability ----------------------------------------------------------

    def rocr(self, contributor_id: str) -> float | None:
        """Share of live non-null votes on resolved relationships that conform.

        None when the contributor has no resolved non-null votes (no evidence).
        """
        self.require_contributor(contributor_id)
        conforming = total = 0
        for rel_id, votes in self.votes.items():
            rel = self.graph.relationships[rel_id]
            if rel.state == store.PENDING:
                continue
            label = rel.state == store.ACCEPTED
            for vote in votes:
                if vote.live and vote.contributor == contributor_id and vote.value is not None:
                    total += 1
                    if vote.value == label:
                        conforming += 1
        if total == 0:
            return None
        return conforming / total

    def recompute_reliability(self, contributor_id: str) -> ContributorRecord:
        record = self.require_contributor(contributor_id)
        score = self.rocr(contributor_id)
        if score is not None and score < self.policy.reliability_floor and record.reliable:
            self._revoke(record)
        return record

    def _revoke(self, record: ContributorRecord) -> None:
        record.reliable = False
        record.creator = False
        touched = []
        for rel_id, votes in self.votes.items():
            for vote in votes:
                if vote.contributor == record.id and not vote.nullified:
                    vote.nullified = True
                    touched.append(rel_id)
        self._emit("revocation", contributor=record.id, nullified=len(touched))
        for rel_id in dict.fromkeys(touched):
            self._resolve(rel_id)

    # -- creator permissions ---------------------------------------------------

    def votes_cast(self, contributor_id: str) -> int:
        """Distinct relationships on which the contributor has a live non-null vote."""
        return len(self._voted_relationships(contributor_id))

    def topics_voted(self, contributor_id: str) -> set[str]:
        out: set[str] = set()
        for rel_id in self._voted_relationships(contributor_id):
            rel = self.graph.relationships[rel_id]
            out.update(rel.endpoints())
        return out

    def _voted_relationships(self, contributor_id: str) -> set[str]:
        return {
            rel_id
            for rel_id, votes in self.votes.items()
            if any(v.live and v.contributor == contributor_id and v.value is not None for v in votes)
        }

    def grant_creator(self, contributor_id: str) -> ContributorRecord:
        record = self.require_contributor(contributor_id)
        if not record.reliable:
            raise NotReliable(f"contributor {contributor_id} is not reliable")
        accepted_verbs = {
            v.id for v in self.graph.relation_types.values() if v.state == store.ACCEPTED
        }
        qualified = (
            accepted_verbs <= record.verbs_read
            and self.votes_cast(contributor_id) >= 50
            and len(self.topics_voted(contributor_id)) >= 20
        )
        if qualified and not record.creator:
            record.creator = True
            self._emit("grant", contributor=contributor_id)
        elif not qualified:
            record.creator = False
        return record

    def contributor_view(self, contributor_id: str) -> dict:
        record = self.require_contributor(contributor_id)
        return {
            "id": record.id,
            "background": record.background,
            "years_experience": record.years_experience,
            "verbs_read": sorted(record.verbs_read),
            "reliable": record.reliable,
            "creator": record.creator,
            "votes_cast": self.votes_cast(contributor_id),
            "topics_voted": sorted(self.topics_voted(contributor_id)),
            "rocr": self.rocr(contributor_id),
        }

    # -- quality metrics --------------------------------------------------------

    def metrics(self) -> dict[str, float]:
        tallies = [self.tally(rel_id) for rel_id in self.votes]
        return curation_metrics(tallies, self.votes)


def curation_metrics(
    tallies: Iterable[CurationTally], votes: Mapping[str, Sequence[Vote]]
) -> dict[str, float]:
    """SR, AARTR, and AROCR over resolved relationships.

    SR: accepted / resolved. AARTR: accepted relationships whose every live
    non-null vote was true, over accepted. AROCR: mean per-contributor
    conformance ratio over contributors with at least one resolved vote.
    """
    resolved = [t for t in tallies if t.resolution != OPEN]
    if not resolved:
        raise EmptyInput("no resolved relationships")
    n_true = sum(1 for t in resolved if t.resolution == ACCEPTED)
    n_false = len(resolved) - n_true

    unanimous = 0
    for t in resolved:
        if t.resolution != ACCEPTED:
            continue
        values = [
            v.value for v in votes.get(t.relationship, ()) if v.live and v.value is not None
        ]
        if values and all(values):
            unanimous += 1

    label = {t.relationship: t.resolution == ACCEPTED for t in resolved}
    per_rater: dict[str, list[bool]] = {}
    for rel_id, rel_votes in votes.items():
        if rel_id not in label:
            continue
        for v in rel_votes:
            if v.live and v.value is not None:
                per_rater.setdefault(v.contributor, []).append(v.value == label[rel_id])

    sr = n_true / (n_true + n_false)
    aartr = unanimous / n_true if n_true else 0.0
    rocrs = [sum(marks) / len(marks) for marks in per_rater.values()]
    arocr = sum(rocrs) / len(rocrs) if rocrs else 0.0
    return {"sr": sr, "aartr": aartr, "arocr": arocr}
