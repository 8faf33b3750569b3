"""Collaborative-filtering baseline and classifier+augmenter stacking.

TopFilter recommends from the topic sets of the most similar projects:
cosine similarity over binary topic vectors picks a neighborhood, and
candidate topics are scored by the summed similarity of the neighbors
that carry them. Stacking composes a classifier's top picks with either
the graph augmenter or TopFilter into one fixed-length list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import classify, spreading, store
from .errors import UnknownProject
from .spreading import AugmentationResult

NEIGHBORHOOD = 25


@dataclass
class ProjectTopicMatrix:
    rows: list[str]
    topics_by_project: dict[str, frozenset[str]]

    @classmethod
    def from_records(cls, records: Iterable[classify.RepositoryRecord]) -> "ProjectTopicMatrix":
        topics_by_project = {rec.id: frozenset(rec.topics) for rec in records}
        for project, topics in topics_by_project.items():
            if not topics:
                raise ValueError(f"project has no topics: {project}")
        return cls(rows=list(topics_by_project), topics_by_project=topics_by_project)

    @property
    def columns(self) -> list[str]:
        out: set[str] = set()
        for topics in self.topics_by_project.values():
            out.update(topics)
        return sorted(out)


def cosine_similarity(a: frozenset[str] | set[str], b: frozenset[str] | set[str]) -> float:
    """Cosine over binary topic vectors: |A∩B| / (sqrt|A| * sqrt|B|)."""
    if not a or not b:
        return 0.0
    return len(a & b) / math.sqrt(len(a) * len(b))


def jaccard_similarity(a: frozenset[str] | set[str], b: frozenset[str] | set[str]) -> float:
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def topfilter_augment(
    query_topics: set[str] | frozenset[str],
    matrix: ProjectTopicMatrix,
    k: int,
    neighborhood: int = NEIGHBORHOOD,
    exclude_project: str | None = None,
    similarity: str = "cosine",
) -> AugmentationResult:
    """Recommend topics carried by the most similar projects.

    Candidates are scored by the summed similarity of the neighbors that
    carry them; the query project itself never contributes. failed is set
    when the neighborhood yields no candidate outside the query set.
    """
    if not query_topics:
        raise ValueError("query topic set must be non-empty")
    if exclude_project is not None and exclude_project not in matrix.topics_by_project:
        raise UnknownProject(f"no such project: {exclude_project}")
    sim_fn = cosine_similarity if similarity == "cosine" else jaccard_similarity

    query = frozenset(query_topics)
    scored = []
    for project in matrix.rows:
        if project == exclude_project:
            continue
        sim = sim_fn(query, matrix.topics_by_project[project])
        if sim > 0.0:
            scored.append((project, sim))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    neighbors = scored[:neighborhood]

    candidate_scores: dict[str, float] = {}
    for project, sim in neighbors:
        for topic in matrix.topics_by_project[project] - query:
            candidate_scores[topic] = candidate_scores.get(topic, 0.0) + sim
    if not candidate_scores:
        return AugmentationResult(ranked=[], failed=True)
    ranked = sorted(candidate_scores.items(), key=lambda pair: (-pair[1], pair[0]))
    return AugmentationResult(ranked=ranked[:k], failed=False)


AUGMENTER_KGREC = "kgrec"
AUGMENTER_TOPFILTER = "topfilter"


def stack(
    picks: Sequence[tuple[str, float]],
    augmenter: str,
    cfg: classify.RecommenderConfig,
    *,
    graph: store.KnowledgeGraph | None = None,
    weights: spreading.TopicWeights | None = None,
    matrix: ProjectTopicMatrix | None = None,
) -> classify.RecommendationList:
    """Compose m classifier picks with g picks from the chosen augmenter."""
    if len(picks) != cfg.m:
        raise ValueError(f"expected {cfg.m} classifier picks, got {len(picks)}")
    if augmenter == AUGMENTER_KGREC:
        if graph is None or weights is None:
            raise ValueError("kgrec stacking needs graph and weights")
        augmented = classify.graph_augmented_picks(picks, weights, graph, cfg.g)
    elif augmenter == AUGMENTER_TOPFILTER:
        if matrix is None:
            raise ValueError("topfilter stacking needs a project-topic matrix")
        result = topfilter_augment({name for name, _ in picks}, matrix, k=cfg.g)
        augmented = result.ranked
    else:
        raise ValueError(f"unknown augmenter: {augmenter!r}")
    return classify.compose_recommendation(picks, augmented, cfg.g)
