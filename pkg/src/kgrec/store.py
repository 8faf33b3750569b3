"""Authoritative store for topics, relation types, and relationships.

The graph is append-oriented: rejected entities are tombstoned, never
deleted, so that re-suggestions of previously rejected content can be
detected. Adjacency queries treat every relationship as undirected and
only count accepted ones.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import (
    DuplicateName,
    DuplicateRelationship,
    InvalidName,
    InvariantViolation,
    UnknownRelationType,
    UnknownTopic,
)

PENDING = "pending"
ACCEPTED = "accepted"
REJECTED = "rejected"
STATES = (PENDING, ACCEPTED, REJECTED)

ORIGIN_FEATURED = "github-featured"
ORIGIN_MAINTAINER = "maintainer"
ORIGIN_CONTRIBUTOR = "contributor"
ORIGINS = (ORIGIN_FEATURED, ORIGIN_MAINTAINER, ORIGIN_CONTRIBUTOR)

MAINTAINER = "maintainer"

# lowercase tokens joined by single hyphens; digits and a few symbol chars
# (c++, c#, .net-style names) are allowed inside a token
_NAME_RE = re.compile(r"^[a-z0-9.+#][a-z0-9.+#]*(-[a-z0-9.+#]+)*$")


def validate_name(name: str) -> str:
    """Check a full_name/verb is normalized; returns it unchanged."""
    if not name or not _NAME_RE.match(name):
        raise InvalidName(f"not a normalized lowercase-hyphenated name: {name!r}")
    return name


def levenshtein(a: str, b: str) -> int:
    """Classic dynamic-programming edit distance (insert/delete/substitute)."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost))
        prev = cur
    return prev[-1]


def name_similarity(a: str, b: str) -> float:
    """Normalized similarity 1 - dist/maxlen, case-insensitive, in [0, 1]."""
    a = a.lower()
    b = b.lower()
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


@dataclass
class Topic:
    id: str
    full_name: str
    display_name: str = ""
    aliases: set[str] = field(default_factory=set)
    description: str = ""
    info_links: list[str] = field(default_factory=list)
    origin: str = ORIGIN_CONTRIBUTOR
    state: str = PENDING
    popularity_count: int = 0

    def names(self) -> set[str]:
        """All names that participate in redundancy detection."""
        out = {self.full_name}
        if self.display_name:
            out.add(self.display_name)
        out.update(self.aliases)
        return out


@dataclass
class RelationType:
    id: str
    verb: str
    definition: str = ""
    bidirectional: bool = False
    state: str = PENDING


@dataclass
class Relationship:
    id: str
    subject: str
    verb: str
    object: str
    state: str = PENDING
    proposer: str = MAINTAINER

    def endpoints(self) -> tuple[str, str]:
        return (self.subject, self.object)


class KnowledgeGraph:
    """Mutable topic graph with uniqueness and referential-integrity checks.

    Mutations are not thread-safe on their own; the durable store serializes
    writers and hands read-only use to concurrent readers.
    """

    def __init__(self, snapshot_label: str = ""):
        self.snapshot_label = snapshot_label
        self.topics: dict[str, Topic] = {}
        self.relation_types: dict[str, RelationType] = {}
        self.relationships: dict[str, Relationship] = {}
        self._topic_ids_by_name: dict[str, str] = {}
        self._verb_ids_by_name: dict[str, str] = {}
        self._counters = {"t": 0, "v": 0, "r": 0}

    # -- id allocation ----------------------------------------------------

    def _next_id(self, prefix: str) -> str:
        self._counters[prefix] += 1
        return f"{prefix}{self._counters[prefix]}"

    def _register_id(self, prefix: str, entity_id: str) -> None:
        # keep counters ahead of explicitly supplied ids (snapshot import)
        m = re.fullmatch(rf"{prefix}(\d+)", entity_id)
        if m:
            self._counters[prefix] = max(self._counters[prefix], int(m.group(1)))

    # -- topics -------------------------------------------------------------

    def add_topic(
        self,
        full_name: str,
        display_name: str = "",
        aliases: Iterable[str] = (),
        description: str = "",
        info_links: Iterable[str] = (),
        origin: str = ORIGIN_CONTRIBUTOR,
        popularity_count: int = 0,
        *,
        topic_id: str | None = None,
        state: str | None = None,
    ) -> Topic:
        validate_name(full_name)
        if origin not in ORIGINS:
            raise InvalidName(f"unknown origin: {origin!r}")
        if popularity_count < 0:
            raise InvariantViolation("popularity_count must be >= 0")
        key = full_name.lower()
        existing = self._topic_ids_by_name.get(key)
        if existing is not None and self.topics[existing].state != REJECTED:
            raise DuplicateName(f"topic full_name already exists: {full_name!r}")
        if state is None:
            state = ACCEPTED if origin == ORIGIN_FEATURED else PENDING
        if origin == ORIGIN_FEATURED and state != ACCEPTED:
            raise InvariantViolation("github-featured topics are accepted")
        if topic_id is None:
            topic_id = self._next_id("t")
        elif topic_id in self.topics:
            raise InvariantViolation(f"topic id already used: {topic_id}")
        self._register_id("t", topic_id)
        topic = Topic(
            id=topic_id,
            full_name=full_name,
            display_name=display_name or full_name,
            aliases=set(aliases),
            description=description,
            info_links=list(info_links),
            origin=origin,
            state=state,
            popularity_count=popularity_count,
        )
        self.topics[topic_id] = topic
        self._topic_ids_by_name[key] = topic_id
        return topic

    def topic_by_name(self, full_name: str) -> Topic | None:
        tid = self._topic_ids_by_name.get(full_name.lower())
        return self.topics.get(tid) if tid else None

    def require_topic(self, topic_id: str) -> Topic:
        try:
            return self.topics[topic_id]
        except KeyError:
            raise UnknownTopic(f"no such topic: {topic_id}") from None

    # -- relation types -----------------------------------------------------

    def add_relation_type(
        self,
        verb: str,
        definition: str = "",
        bidirectional: bool = False,
        *,
        verb_id: str | None = None,
        state: str = PENDING,
    ) -> RelationType:
        validate_name(verb)
        key = verb.lower()
        existing = self._verb_ids_by_name.get(key)
        if existing is not None and self.relation_types[existing].state != REJECTED:
            raise DuplicateName(f"relation type already exists: {verb!r}")
        if verb_id is None:
            verb_id = self._next_id("v")
        elif verb_id in self.relation_types:
            raise InvariantViolation(f"relation type id already used: {verb_id}")
        self._register_id("v", verb_id)
        rt = RelationType(
            id=verb_id,
            verb=verb,
            definition=definition,
            bidirectional=bidirectional,
            state=state,
        )
        self.relation_types[verb_id] = rt
        self._verb_ids_by_name[key] = verb_id
        return rt

    def verb_by_name(self, verb: str) -> RelationType | None:
        vid = self._verb_ids_by_name.get(verb.lower())
        return self.relation_types.get(vid) if vid else None

    def require_verb(self, verb_id: str) -> RelationType:
        try:
            return self.relation_types[verb_id]
        except KeyError:
            raise UnknownRelationType(f"no such relation type: {verb_id}") from None

    # -- relationships --------------------------------------------------------

    def _relationship_key(self, subject: str, verb: str, obj: str):
        # unordered endpoints for bidirectional verbs, ordered otherwise
        if self.relation_types[verb].bidirectional:
            return (verb, frozenset((subject, obj)))
        return (verb, subject, obj)

    def add_relationship(
        self,
        subject: str,
        verb: str,
        obj: str,
        proposer: str = MAINTAINER,
        *,
        rel_id: str | None = None,
        state: str = PENDING,
    ) -> Relationship:
        self.require_topic(subject)
        self.require_topic(obj)
        self.require_verb(verb)
        if subject == obj:
            raise InvariantViolation("relationship endpoints must differ (no self loops)")
        key = self._relationship_key(subject, verb, obj)
        for other in self.relationships.values():
            if other.state != REJECTED and self._relationship_key(other.subject, other.verb, other.object) == key:
                raise DuplicateRelationship(f"relationship already exists: {other.id}")
        if rel_id is None:
            rel_id = self._next_id("r")
        elif rel_id in self.relationships:
            raise InvariantViolation(f"relationship id already used: {rel_id}")
        self._register_id("r", rel_id)
        rel = Relationship(id=rel_id, subject=subject, verb=verb, object=obj, state=state, proposer=proposer)
        self.relationships[rel_id] = rel
        if state == ACCEPTED:
            self._confer_acceptance(rel)
        return rel

    def rejected_duplicates(self, subject: str, verb: str, obj: str) -> list[str]:
        """Ids of rejected relationships with this key (re-suggestion surfacing)."""
        key = self._relationship_key(subject, verb, obj)
        return [
            r.id
            for r in self.relationships.values()
            if r.state == REJECTED and self._relationship_key(r.subject, r.verb, r.object) == key
        ]

    def require_relationship(self, rel_id: str) -> Relationship:
        try:
            return self.relationships[rel_id]
        except KeyError:
            from .errors import UnknownRelationship

            raise UnknownRelationship(f"no such relationship: {rel_id}") from None

    def set_relationship_state(self, rel_id: str, state: str) -> None:
        """Update a relationship's state and re-derive endpoint/verb acceptance."""
        rel = self.require_relationship(rel_id)
        if rel.state == state:
            return
        rel.state = state
        if state == ACCEPTED:
            self._confer_acceptance(rel)
        else:
            self._refresh_acceptance(
                topic_ids=(rel.subject, rel.object), verb_ids=(rel.verb,)
            )

    def _confer_acceptance(self, rel: Relationship) -> None:
        # membership in an accepted relationship accepts its endpoints and verb
        for tid in rel.endpoints():
            topic = self.topics[tid]
            if topic.state != ACCEPTED:
                topic.state = ACCEPTED
        verb = self.relation_types[rel.verb]
        if verb.state != ACCEPTED:
            verb.state = ACCEPTED

    def _refresh_acceptance(self, topic_ids: Iterable[str], verb_ids: Iterable[str]) -> None:
        for tid in topic_ids:
            topic = self.topics[tid]
            if topic.state == ACCEPTED and topic.origin != ORIGIN_FEATURED:
                if not any(
                    r.state == ACCEPTED and tid in r.endpoints() for r in self.relationships.values()
                ):
                    topic.state = PENDING
        for vid in verb_ids:
            verb = self.relation_types[vid]
            if verb.state == ACCEPTED and not any(
                r.state == ACCEPTED and r.verb == vid for r in self.relationships.values()
            ):
                verb.state = PENDING

    # -- adjacency ------------------------------------------------------------

    def accepted_relationships(self) -> Iterator[Relationship]:
        return (r for r in self.relationships.values() if r.state == ACCEPTED)

    def neighbors(self, topic_id: str) -> set[str]:
        """Topics linked to topic_id by an accepted relationship, either direction."""
        self.require_topic(topic_id)
        out: set[str] = set()
        for rel in self.accepted_relationships():
            if rel.subject == topic_id:
                out.add(rel.object)
            elif rel.object == topic_id:
                out.add(rel.subject)
        return out

    def degree(self, topic_id: str) -> int:
        """Count of accepted relationships incident to the topic (once each)."""
        self.require_topic(topic_id)
        return sum(1 for r in self.accepted_relationships() if topic_id in r.endpoints())

    # -- redundancy detection ----------------------------------------------

    def detect_redundancy(
        self,
        draft_names: Iterable[str],
        threshold: float = 0.80,
        exclude_topic: str | None = None,
    ) -> list[tuple[str, float]]:
        """Existing topics whose best name similarity to the draft meets the threshold.

        Every draft name is compared against every name (full, display, aliases)
        of every non-rejected topic; the pair's best similarity decides.
        Returns (topic id, best similarity), best first.
        """
        draft = [n for n in (s.strip() for s in draft_names) if n]
        flagged: list[tuple[str, float]] = []
        for topic in self.topics.values():
            if topic.state == REJECTED or topic.id == exclude_topic:
                continue
            best = max(
                (name_similarity(a, b) for a in draft for b in topic.names()),
                default=0.0,
            )
            if best >= threshold:
                flagged.append((topic.id, best))
        flagged.sort(key=lambda pair: (-pair[1], self.topics[pair[0]].full_name))
        return flagged

    # -- integrity -------------------------------------------------------------

    def validate(self) -> None:
        """Raise InvariantViolation if any structural invariant is broken."""
        seen_names: dict[str, str] = {}
        for topic in self.topics.values():
            if topic.state != REJECTED:
                key = topic.full_name.lower()
                if key in seen_names:
                    raise InvariantViolation(f"duplicate topic name: {topic.full_name}")
                seen_names[key] = topic.id
            if topic.origin == ORIGIN_FEATURED and topic.state != ACCEPTED:
                raise InvariantViolation(f"featured topic not accepted: {topic.full_name}")
            if topic.popularity_count < 0:
                raise InvariantViolation(f"negative popularity: {topic.full_name}")
        seen_keys: set = set()
        for rel in self.relationships.values():
            if rel.subject not in self.topics or rel.object not in self.topics:
                raise InvariantViolation(f"relationship {rel.id} references unknown topic")
            if rel.verb not in self.relation_types:
                raise InvariantViolation(f"relationship {rel.id} references unknown verb")
            if rel.subject == rel.object:
                raise InvariantViolation(f"relationship {rel.id} is a self loop")
            if rel.state != REJECTED:
                key = self._relationship_key(rel.subject, rel.verb, rel.object)
                if key in seen_keys:
                    raise InvariantViolation(f"duplicate relationship key: {rel.id}")
                seen_keys.add(key)

    def structural_state(self) -> dict:
        """Canonical plain-data view used for equality checks in tests."""
        return {
            "label": self.snapshot_label,
            "topics": {
                t.id: (
                    t.full_name,
                    t.display_name,
                    tuple(sorted(t.aliases)),
                    t.description,
                    tuple(t.info_links),
                    t.origin,
                    t.state,
                    t.popularity_count,
                )
                for t in self.topics.values()
            },
            "verbs": {
                v.id: (v.verb, v.definition, v.bidirectional, v.state)
                for v in self.relation_types.values()
            },
            "relationships": {
                r.id: (r.subject, r.verb, r.object, r.state, r.proposer)
                for r in self.relationships.values()
            },
        }
