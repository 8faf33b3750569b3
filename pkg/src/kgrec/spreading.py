"""Topic weighting and depth-one spreading activation over the accepted graph.

Every accepted topic gets a weight combining its community popularity and
its connectedness, both log-scaled and normalized to the graph maximum.
Augmentation activates the seed topics with their assigned probabilities
and spreads one hop along accepted edges: a candidate's score is its
weight times the summed probabilities of the seed topics it touches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from . import store
from .errors import EmptyGraph, InvalidCoefficients, UnknownSeedTopic


@dataclass(frozen=True)
class TopicWeights:
    alpha: float
    beta: float
    weights: dict[str, float]
    popularity: dict[str, float]
    degree_score: dict[str, float]


@dataclass
class AugmentationResult:
    ranked: list[tuple[str, float]]  # (topic id, score), scores non-increasing
    failed: bool

    @property
    def topic_ids(self) -> list[str]:
        return [tid for tid, _ in self.ranked]


def _log_normalized(counts: Mapping[str, int]) -> dict[str, float]:
    scaled = {tid: math.log(n + 1) for tid, n in counts.items()}
    top = max(scaled.values(), default=0.0)
    if top == 0.0:
        # all counts zero: score everything 0 instead of dividing by zero
        return {tid: 0.0 for tid in scaled}
    return {tid: v / top for tid, v in scaled.items()}


def compute_weights(
    graph: store.KnowledgeGraph, alpha: float = 0.5, beta: float = 0.5
) -> TopicWeights:
    """Weight the accepted topics: alpha * popularity + beta * degree score."""
    if alpha < 0 or beta < 0 or abs(alpha + beta - 1.0) > 1e-9:
        raise InvalidCoefficients(f"alpha={alpha}, beta={beta} must be >= 0 and sum to 1")
    accepted = [t for t in graph.topics.values() if t.state == store.ACCEPTED]
    if not accepted:
        raise EmptyGraph("no accepted topics to weight")
    popularity = _log_normalized({t.id: t.popularity_count for t in accepted})
    degree_score = _log_normalized({t.id: graph.degree(t.id) for t in accepted})
    weights = {
        t.id: alpha * popularity[t.id] + beta * degree_score[t.id] for t in accepted
    }
    return TopicWeights(
        alpha=alpha,
        beta=beta,
        weights=weights,
        popularity=popularity,
        degree_score=degree_score,
    )


def augment(
    seed: Mapping[str, float],
    weights: TopicWeights,
    graph: store.KnowledgeGraph,
    k: int,
) -> AugmentationResult:
    """Recommend up to k accepted topics adjacent to the seed set.

    seed maps topic id -> probability in (0, 1]. Seed topics never appear
    in the output; candidates are ranked by score, ties broken by
    full_name. failed is set when the seed has no outside neighbors.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    for tid, prob in seed.items():
        if tid not in graph.topics:
            raise UnknownSeedTopic(f"seed topic not in graph: {tid}")
        if not (0.0 < prob <= 1.0):
            raise ValueError(f"seed probability out of (0, 1]: {tid}={prob}")

    adjacency = {tid: graph.neighbors(tid) for tid in seed}
    candidates: set[str] = set()
    for found in adjacency.values():
        candidates.update(found)
    candidates -= set(seed)
    candidates = {tid for tid in candidates if graph.topics[tid].state == store.ACCEPTED}
    if not candidates:
        return AugmentationResult(ranked=[], failed=True)

    scores: list[tuple[str, float]] = []
    for tid in candidates:
        spread = sum(prob for s, prob in seed.items() if tid in adjacency[s])
        scores.append((tid, weights.weights.get(tid, 0.0) * spread))
    scores.sort(key=lambda pair: (-pair[1], graph.topics[pair[0]].full_name))
    return AugmentationResult(ranked=scores[:k], failed=False)


def augment_by_name(
    seed_names: Mapping[str, float],
    weights: TopicWeights,
    graph: store.KnowledgeGraph,
    k: int,
) -> AugmentationResult:
    """augment() with seeds given as full names; unknown names raise."""
    seed: dict[str, float] = {}
    for name, prob in seed_names.items():
        topic = graph.topic_by_name(name)
        if topic is None:
            raise UnknownSeedTopic(f"seed topic not in graph: {name}")
        seed[topic.id] = prob
    return augment(seed, weights, graph, k)


def export_weights(weights: TopicWeights, graph: store.KnowledgeGraph) -> str:
    """Two-column inspection table: full_name <tab> weight, heaviest first."""
    rows = sorted(
        weights.weights.items(),
        key=lambda pair: (-pair[1], graph.topics[pair[0]].full_name),
    )
    return "".join(
        f"{graph.topics[tid].full_name}\t{value:.6f}\n" for tid, value in rows
    )
