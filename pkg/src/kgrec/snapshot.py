"""Snapshot persistence: UTF-8, one JSON record per line, typed by `kind`.

The first line is a `snapshot` header; then topics, relation types,
relationships, and live votes in stable field order. Round-tripping a
graph through encode/decode preserves its observable state, including
vote ledgers and acceptance states.
"""

from __future__ import annotations

import json
from typing import Iterator, Mapping, Sequence

from . import store
from .curation import AcceptancePolicy, ContributorRecord, CurationEngine, Vote
from .errors import InvariantViolation, ParseError

FORMAT_VERSION = 1


def _topic_record(t: store.Topic) -> dict:
    return {
        "kind": "topic",
        "id": t.id,
        "full_name": t.full_name,
        "display_name": t.display_name,
        "aliases": sorted(t.aliases),
        "description": t.description,
        "info_links": list(t.info_links),
        "origin": t.origin,
        "state": t.state,
        "popularity_count": t.popularity_count,
    }


def _verb_record(v: store.RelationType) -> dict:
    return {
        "kind": "verb",
        "id": v.id,
        "verb": v.verb,
        "definition": v.definition,
        "bidirectional": v.bidirectional,
        "state": v.state,
    }


def _relationship_record(r: store.Relationship) -> dict:
    return {
        "kind": "relationship",
        "id": r.id,
        "subject": r.subject,
        "verb": r.verb,
        "object": r.object,
        "state": r.state,
        "proposer": r.proposer,
    }


def _vote_record(v: Vote) -> dict:
    return {
        "kind": "vote",
        "contributor": v.contributor,
        "relationship": v.relationship,
        "value": v.value,
        "ordinal": v.ordinal,
    }


def iter_records(
    graph: store.KnowledgeGraph, votes: Mapping[str, Sequence[Vote]] | None = None
) -> Iterator[dict]:
    yield {"kind": "snapshot", "version": FORMAT_VERSION, "label": graph.snapshot_label}
    for topic in graph.topics.values():
        yield _topic_record(topic)
    for verb in graph.relation_types.values():
        yield _verb_record(verb)
    for rel in graph.relationships.values():
        yield _relationship_record(rel)
    if votes:
        for rel_id in graph.relationships:
            for vote in votes.get(rel_id, ()):
                if vote.live:
                    yield _vote_record(vote)


def encode_snapshot(
    graph: store.KnowledgeGraph, votes: Mapping[str, Sequence[Vote]] | None = None
) -> str:
    graph.validate()
    return "".join(json.dumps(rec, ensure_ascii=False) + "\n" for rec in iter_records(graph, votes))


def export_engine(engine: CurationEngine) -> str:
    return encode_snapshot(engine.graph, engine.votes)


def decode_snapshot(text: str, policy: AcceptancePolicy | None = None) -> CurationEngine:
    """Rebuild a curation engine (graph + vote ledgers) from snapshot text.

    Contributors are not part of the snapshot format; voters found in the
    ledger are re-registered as reliable with their voted verbs marked read.
    """
    graph = store.KnowledgeGraph()
    engine = CurationEngine(graph, policy)
    votes: list[dict] = []
    saw_header = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line=lineno) from None
        if not isinstance(rec, dict) or "kind" not in rec:
            raise ParseError("record missing 'kind'", line=lineno)
        kind = rec["kind"]
        try:
            if kind == "snapshot":
                if rec.get("version") != FORMAT_VERSION:
                    raise ParseError(f"unsupported version: {rec.get('version')}", line=lineno)
                graph.snapshot_label = rec.get("label", "")
                saw_header = True
            elif kind == "topic":
                graph.add_topic(
                    rec["full_name"],
                    display_name=rec.get("display_name", ""),
                    aliases=rec.get("aliases", ()),
                    description=rec.get("description", ""),
                    info_links=rec.get("info_links", ()),
                    origin=rec.get("origin", store.ORIGIN_CONTRIBUTOR),
                    popularity_count=rec.get("popularity_count", 0),
                    topic_id=rec["id"],
                    state=rec.get("state", store.PENDING),
                )
            elif kind == "verb":
                graph.add_relation_type(
                    rec["verb"],
                    definition=rec.get("definition", ""),
                    bidirectional=rec.get("bidirectional", False),
                    verb_id=rec["id"],
                    state=rec.get("state", store.PENDING),
                )
            elif kind == "relationship":
                graph.add_relationship(
                    rec["subject"],
                    rec["verb"],
                    rec["object"],
                    proposer=rec.get("proposer", store.MAINTAINER),
                    rel_id=rec["id"],
                    state=rec.get("state", store.PENDING),
                )
                engine.votes.setdefault(rec["id"], [])
            elif kind == "vote":
                votes.append(rec)
            else:
                raise ParseError(f"unknown record kind: {kind!r}", line=lineno)
        except KeyError as exc:
            raise ParseError(f"{kind} record missing field {exc}", line=lineno) from None
        except (store.UnknownTopic, InvariantViolation) as exc:
            raise InvariantViolation(f"line {lineno}: {exc}") from None
    if not saw_header:
        raise ParseError("missing snapshot header")

    max_ordinal = 0
    for rec in votes:
        rel_id = rec["relationship"]
        if rel_id not in graph.relationships:
            raise InvariantViolation(f"vote references unknown relationship: {rel_id}")
        vote = Vote(
            contributor=rec["contributor"],
            relationship=rel_id,
            value=rec["value"],
            ordinal=int(rec.get("ordinal", 0)),
        )
        engine.votes.setdefault(rel_id, []).append(vote)
        max_ordinal = max(max_ordinal, vote.ordinal)
        voter = engine.contributors.get(vote.contributor)
        if voter is None:
            voter = ContributorRecord(id=vote.contributor, years_experience=1.0)
            engine.contributors[vote.contributor] = voter
        voter.verbs_read.add(graph.relationships[rel_id].verb)
    for ledger in engine.votes.values():
        ledger.sort(key=lambda v: v.ordinal)
    engine._ordinal = max(max_ordinal, engine._ordinal)

    graph.validate()
    for rel in graph.relationships.values():
        ledger = engine.votes.get(rel.id, ())
        non_null = sum(1 for v in ledger if v.value is not None)
        if rel.state != store.PENDING and ledger and non_null < 3:
            raise InvariantViolation(
                f"relationship {rel.id} resolved with only {non_null} non-null votes"
            )
    return engine


def write_snapshot(path, graph: store.KnowledgeGraph, votes=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(encode_snapshot(graph, votes))


def read_snapshot(path, policy: AcceptancePolicy | None = None) -> CurationEngine:
    with open(path, "r", encoding="utf-8") as fh:
        return decode_snapshot(fh.read(), policy)
