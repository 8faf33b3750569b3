"""HTTP service over the durable store: curation plus recommendation.

Every mutation is durably logged before the response goes out. Auth is a
bearer token equal to the contributor id (the maintainer token is set in
the service config); creator-level permission gates entity creation,
mirroring the platform policy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Depends, FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from . import classify, spreading, store
from .curation import CurationTally
from .errors import (
    AllSourcesUnavailable,
    AlreadyResolved,
    BindFailure,
    DuplicateName,
    DuplicateRelationship,
    EmptyInput,
    KgrecError,
    NotCreator,
    NotReliable,
    UnknownContributor,
    UnknownRelationType,
    UnknownRelationship,
    UnknownSeedTopic,
    UnknownTopic,
    UntrainedModel,
    VerbUnread,
)
from .persistence import DurableStore

_STATUS_BY_ERROR: list[tuple[type, int]] = [
    (UnknownTopic, 404),
    (UnknownRelationType, 404),
    (UnknownRelationship, 404),
    (UnknownContributor, 404),
    (UnknownSeedTopic, 404),
    (UntrainedModel, 404),
    (DuplicateName, 409),
    (DuplicateRelationship, 409),
    (AlreadyResolved, 409),
    (NotReliable, 403),
    (NotCreator, 403),
    (VerbUnread, 403),
    (EmptyInput, 422),
    (AllSourcesUnavailable, 503),
]


def _status_for(exc: KgrecError) -> int:
    for klass, status in _STATUS_BY_ERROR:
        if isinstance(exc, klass):
            return status
    return 400


@dataclass
class ServiceConfig:
    maintainer_token: str = "maintainer"
    redundancy_threshold: float = 0.80
    alpha: float = 0.5
    beta: float = 0.5
    k: int = 5
    m: int = 3
    g: int = 2
    model_paths: dict[str, str] = field(default_factory=dict)


# --- request bodies -------------------------------------------------------


class TopicIn(BaseModel):
    full_name: str
    display_name: str = ""
    aliases: list[str] = Field(default_factory=list)
    description: str = ""
    info_links: list[str] = Field(default_factory=list)
    origin: str = store.ORIGIN_CONTRIBUTOR


class RelationTypeIn(BaseModel):
    verb: str
    definition: str = ""
    bidirectional: bool = False


class RelationshipIn(BaseModel):
    subject: str
    verb: str
    object: str


class VoteIn(BaseModel):
    value: bool | None


class ContributorIn(BaseModel):
    id: str
    background: str = "industry"
    years_experience: float = 1.0


class AugmentIn(BaseModel):
    topics: list[str]
    k: int = 5
    alpha: float | None = None
    beta: float | None = None


class RecommendIn(BaseModel):
    text: str
    model: str = "default"
    m: int | None = None
    g: int | None = None


# --- serialization ----------------------------------------------------------


def _topic_json(t: store.Topic) -> dict:
    return {
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


def _verb_json(v: store.RelationType) -> dict:
    return {
        "id": v.id,
        "verb": v.verb,
        "definition": v.definition,
        "bidirectional": v.bidirectional,
        "state": v.state,
    }


def _tally_json(t: CurationTally) -> dict:
    return {
        "relationship": t.relationship,
        "true_count": t.true_count,
        "false_count": t.false_count,
        "null_count": t.null_count,
        "resolution": t.resolution,
    }


def create_app(durable: DurableStore, config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="kgrec service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    models: dict[str, tuple[classify.ClassifierModel, classify.VectorizerModel]] = {}

    @app.exception_handler(KgrecError)
    async def _domain_error(_request: Request, exc: KgrecError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(ValueError)
    async def _value_error(_request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": "ValueError", "detail": str(exc)})

    def _token(request: Request) -> str:
        auth = request.headers.get("authorization", "")
        if auth.lower().startswith("bearer "):
            return auth[7:].strip()
        return ""

    def caller(request: Request) -> str:
        token = _token(request)
        if not token:
            raise NotReliable("missing bearer token")
        return token

    def creator_caller(request: Request) -> str:
        token = caller(request)
        if token == config.maintainer_token:
            return store.MAINTAINER
        record = durable.engine.require_contributor(token)
        if not record.creator:
            raise NotCreator(
                "creator permission required (all verbs read, 50 votes over 20 topics)"
            )
        return token

    def _model(model_id: str):
        if model_id not in models:
            path = config.model_paths.get(model_id)
            if path is None or not Path(path).exists():
                raise UntrainedModel(f"no such model: {model_id}")
            models[model_id] = classify.load_model(path)
        return models[model_id]

    # -- health ---------------------------------------------------------------

    @app.get("/healthz")
    def healthz():
        with durable.lock:
            return {
                "status": "ok",
                "topics": len(durable.engine.graph.topics),
                "relationships": len(durable.engine.graph.relationships),
            }

    # -- contributors ------------------------------------------------------------

    @app.post("/contributors", status_code=201)
    def register_contributor(body: ContributorIn):
        durable.register_contributor(body.id, body.background, body.years_experience)
        view = durable.engine.contributor_view(body.id)
        view["token"] = body.id
        return view

    @app.get("/contributors/{contributor_id}")
    def get_contributor(contributor_id: str):
        with durable.lock:
            return durable.engine.contributor_view(contributor_id)

    @app.post("/contributors/{contributor_id}/reliability")
    def recompute_reliability(contributor_id: str):
        durable.recompute_reliability(contributor_id)
        with durable.lock:
            return durable.engine.contributor_view(contributor_id)

    @app.post("/contributors/{contributor_id}/creator")
    def grant_creator(contributor_id: str):
        durable.grant_creator(contributor_id)
        with durable.lock:
            return durable.engine.contributor_view(contributor_id)

    # -- topics --------------------------------------------------------------------

    @app.post("/topics", status_code=201)
    def add_topic(body: TopicIn, who: str = Depends(creator_caller)):
        with durable.lock:
            redundancies = durable.engine.graph.detect_redundancy(
                [body.full_name, body.display_name, *body.aliases],
                threshold=config.redundancy_threshold,
            )
            topic = durable.add_topic(
                body.full_name,
                display_name=body.display_name,
                aliases=set(body.aliases),
                description=body.description,
                info_links=body.info_links,
                origin=body.origin,
            )
            return {
                "topic": _topic_json(topic),
                "redundancies": [
                    {
                        "topic": tid,
                        "full_name": durable.engine.graph.topics[tid].full_name,
                        "similarity": sim,
                    }
                    for tid, sim in redundancies
                ],
            }

    @app.get("/topics/{topic_id}")
    def get_topic(topic_id: str):
        with durable.lock:
            graph = durable.engine.graph
            topic = graph.topics.get(topic_id) or graph.topic_by_name(topic_id)
            if topic is None:
                raise UnknownTopic(f"no such topic: {topic_id}")
            return _topic_json(topic)

    @app.get("/topics/{draft}/redundancies")
    def topic_redundancies(draft: str, threshold: float | None = Query(default=None)):
        """Redundancy check for an existing topic id or a draft name."""
        with durable.lock:
            graph = durable.engine.graph
            limit = threshold if threshold is not None else config.redundancy_threshold
            topic = graph.topics.get(draft) or graph.topic_by_name(draft)
            if topic is not None:
                names, exclude = topic.names(), topic.id
            else:
                names, exclude = [draft], None
            pairs = graph.detect_redundancy(names, threshold=limit, exclude_topic=exclude)
            return {
                "draft": draft,
                "threshold": limit,
                "redundancies": [
                    {
                        "topic": tid,
                        "full_name": graph.topics[tid].full_name,
                        "similarity": sim,
                    }
                    for tid, sim in pairs
                ],
            }

    # -- relation types ---------------------------------------------------------------

    @app.post("/relation-types", status_code=201)
    def add_relation_type(body: RelationTypeIn, who: str = Depends(creator_caller)):
        with durable.lock:
            rt = durable.add_relation_type(
                body.verb, definition=body.definition, bidirectional=body.bidirectional
            )
            return _verb_json(rt)

    @app.get("/relation-types")
    def list_relation_types():
        with durable.lock:
            return [_verb_json(v) for v in durable.engine.graph.relation_types.values()]

    @app.post("/relation-types/{verb_id}/read")
    def mark_verb_read(verb_id: str, who: str = Depends(caller)):
        durable.mark_verb_read(who, verb_id)
        return {"contributor": who, "verb": verb_id, "read": True}

    # -- relationships ---------------------------------------------------------------

    @app.post("/relationships", status_code=201)
    def add_relationship(body: RelationshipIn, who: str = Depends(creator_caller)):
        with durable.lock:
            graph = durable.engine.graph
            resubmission = graph.rejected_duplicates(body.subject, body.verb, body.object)
            rel = durable.add_relationship(body.subject, body.verb, body.object, proposer=who)
            return {
                "relationship": _relationship_json(graph, rel, durable.engine.tally(rel.id)),
                "resubmission_of_rejected": resubmission,
            }

    def _relationship_json(graph, rel: store.Relationship, tally: CurationTally) -> dict:
        verb = graph.relation_types[rel.verb]
        return {
            "id": rel.id,
            "subject": rel.subject,
            "subject_name": graph.topics[rel.subject].full_name,
            "verb": rel.verb,
            "verb_name": verb.verb,
            "verb_definition": verb.definition,
            "object": rel.object,
            "object_name": graph.topics[rel.object].full_name,
            "state": rel.state,
            "proposer": rel.proposer,
            "tally": _tally_json(tally),
        }

    @app.get("/relationships")
    def list_relationships(state: str | None = Query(default=None)):
        with durable.lock:
            graph = durable.engine.graph
            out = []
            for rel in graph.relationships.values():
                if state is not None and rel.state != state:
                    continue
                out.append(_relationship_json(graph, rel, durable.engine.tally(rel.id)))
            return out

    @app.get("/relationships/{rel_id}")
    def get_relationship(rel_id: str):
        with durable.lock:
            graph = durable.engine.graph
            rel = graph.require_relationship(rel_id)
            return _relationship_json(graph, rel, durable.engine.tally(rel_id))

    @app.post("/relationships/{rel_id}/votes")
    def cast_vote(rel_id: str, body: VoteIn, who: str = Depends(caller)):
        tally = durable.cast_vote(who, rel_id, body.value)
        with durable.lock:
            rel = durable.engine.graph.require_relationship(rel_id)
            return {"tally": _tally_json(tally), "state": rel.state}

    # -- metrics -----------------------------------------------------------------------

    @app.get("/metrics/curation")
    def curation_metrics():
        with durable.lock:
            return durable.engine.metrics()

    # -- recommendation ------------------------------------------------------------------

    @app.post("/recommend/augment")
    def recommend_augment(body: AugmentIn):
        with durable.lock:
            graph = durable.engine.graph
            alpha = body.alpha if body.alpha is not None else config.alpha
            beta = body.beta if body.beta is not None else config.beta
            weights = spreading.compute_weights(graph, alpha, beta)
            result = spreading.augment_by_name(
                {name: 1.0 for name in body.topics}, weights, graph, body.k
            )
            return {
                "failed": result.failed,
                "ranked": [
                    {"topic": graph.topics[tid].full_name, "score": score}
                    for tid, score in result.ranked
                ],
            }

    @app.post("/recommend/full")
    def recommend_full(body: RecommendIn):
        model, vectorizer = _model(body.model)
        with durable.lock:
            graph = durable.engine.graph
            m = body.m if body.m is not None else config.m
            g = body.g if body.g is not None else config.g
            cfg = classify.RecommenderConfig(
                k=m + g, m=m, g=g, alpha=config.alpha, beta=config.beta
            )
            weights = spreading.compute_weights(graph, config.alpha, config.beta)
            result = classify.recommend_full(body.text, model, vectorizer, weights, graph, cfg)
            return {
                "partial": result.partial,
                "items": [
                    {"topic": item.topic, "score": item.score, "source": item.source}
                    for item in result.items
                ],
            }

    # -- export -------------------------------------------------------------------------

    @app.get("/kg/export", response_class=PlainTextResponse)
    def export_snapshot():
        return durable.export_snapshot()

    @app.get("/audit/export", response_class=PlainTextResponse)
    def export_audit():
        return durable.export_audit()

    return app


def serve(durable: DurableStore, listen: str = "127.0.0.1:8571", config: ServiceConfig | None = None):
    """Run the service until interrupted."""
    import uvicorn

    host, _, port_text = listen.rpartition(":")
    host = host or "127.0.0.1"
    try:
        port = int(port_text)
    except ValueError:
        raise BindFailure(f"bad listen address: {listen!r}") from None
    app = create_app(durable, config)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        raise BindFailure(f"cannot bind {listen}: {exc}") from exc
