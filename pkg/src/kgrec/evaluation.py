"""Dataset splitting, list-quality metrics, and experiment orchestration.

Metric conventions, also echoed in every report header: the per-list
success rate is precision over the returned list (matching a judge
marking each recommended topic relevant or not); average precision is
normalized by the number of relevant items retrieved within the top k;
success/precision metrics are computed only over cases where the system
returned something, while the failed-case ratio covers everything.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .classify import RecommendationList, RepositoryRecord
from .errors import EmptyInput, MissingJudgments, TooSmall

MODE_AUTOMATED = "automated"
MODE_MANUAL = "manual"


@dataclass
class EvaluationCase:
    project: str
    recommended: list[str]
    relevance: list[bool]
    failed: bool = False

    def __post_init__(self):
        if len(self.recommended) != len(self.relevance):
            raise ValueError("recommended and relevance must be the same length")
        if self.failed and self.recommended:
            raise ValueError("a failed case cannot carry recommendations")


@dataclass
class ExperimentReport:
    system: str
    fcr_full: float
    fcr_sample: float
    asr_at_k: float
    map_at_k: float
    case_count: int
    sample_count: int
    config: dict = field(default_factory=dict)


def split(
    corpus: Sequence[RepositoryRecord], train_fraction: float = 0.8, seed: int = 0
) -> tuple[list[RepositoryRecord], list[RepositoryRecord]]:
    """Deterministic shuffled split; sizes within 1 of the exact fractions."""
    if len(corpus) < 2:
        raise TooSmall(f"need at least 2 records, got {len(corpus)}")
    if not (0.0 < train_fraction < 1.0):
        raise ValueError(f"train_fraction must be in (0, 1): {train_fraction}")
    order = list(range(len(corpus)))
    random.Random(seed).shuffle(order)
    n_train = int(round(train_fraction * len(corpus)))
    n_train = min(max(n_train, 1), len(corpus) - 1)
    train_idx = sorted(order[:n_train])
    test_idx = sorted(order[n_train:])
    return [corpus[i] for i in train_idx], [corpus[i] for i in test_idx]


def fcr(cases: Sequence[EvaluationCase]) -> float:
    """Failed cases over all cases."""
    if not cases:
        raise EmptyInput("no cases")
    return sum(1 for c in cases if c.failed) / len(cases)


def asr_at_k(cases: Sequence[EvaluationCase], k: int) -> float:
    """Mean per-list precision over the non-failed cases, lists cut at k."""
    scored = []
    for case in cases:
        if case.failed:
            continue
        rel = case.relevance[:k]
        scored.append(sum(rel) / len(rel))
    if not scored:
        raise EmptyInput("no non-failed cases")
    return sum(scored) / len(scored)


def average_precision(relevance: Sequence[bool]) -> float:
    """AP over one ranked list: mean precision at each relevant rank.

    Normalized by the number of relevant items in the list; 0.0 when the
    list holds none.
    """
    hits = 0
    precision_sum = 0.0
    for rank, relevant in enumerate(relevance, start=1):
        if relevant:
            hits += 1
            precision_sum += hits / rank
    return precision_sum / hits if hits else 0.0


def map_at_k(cases: Sequence[EvaluationCase], k: int) -> float:
    scored = [average_precision(case.relevance[:k]) for case in cases if not case.failed]
    if not scored:
        raise EmptyInput("no non-failed cases")
    return sum(scored) / len(scored)


# --- relevance sources --------------------------------------------------------


class GroundTruthRelevance:
    """Automated mode: a recommendation is relevant if the owner assigned it."""

    mode = MODE_AUTOMATED

    def judge(self, record: RepositoryRecord, topic: str) -> bool:
        return topic in record.topics


class JudgmentsRelevance:
    """Manual mode: majority verdict of at least three judges per recommendation."""

    mode = MODE_MANUAL

    def __init__(self, verdicts: Mapping[tuple[str, str], bool]):
        self.verdicts = dict(verdicts)

    def judge(self, record: RepositoryRecord, topic: str) -> bool:
        try:
            return self.verdicts[(record.id, topic)]
        except KeyError:
            raise MissingJudgments(
                f"no judgments for project {record.id!r} topic {topic!r}"
            ) from None


def load_judgments(path) -> JudgmentsRelevance:
    """Newline-delimited {project, topic, judge, relevant} records."""
    votes: dict[tuple[str, str], list[bool]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            votes.setdefault((rec["project"], rec["topic"]), []).append(bool(rec["relevant"]))
    verdicts = {}
    for key, marks in votes.items():
        if len(marks) < 3:
            raise MissingJudgments(f"fewer than 3 judges for {key}")
        verdicts[key] = sum(marks) > len(marks) / 2
    return JudgmentsRelevance(verdicts)


# --- experiment runner -----------------------------------------------------------


@dataclass
class System:
    name: str
    recommend: Callable[[RepositoryRecord], RecommendationList]


def build_case(
    record: RepositoryRecord,
    recommendation: RecommendationList,
    relevance_source,
) -> EvaluationCase:
    if recommendation.failed:
        return EvaluationCase(project=record.id, recommended=[], relevance=[], failed=True)
    topics = recommendation.topics
    return EvaluationCase(
        project=record.id,
        recommended=topics,
        relevance=[relevance_source.judge(record, t) for t in topics],
    )


def run_experiment(
    systems: Sequence[System],
    test_records: Sequence[RepositoryRecord],
    relevance_source,
    k: int = 5,
    sample_size: int | None = None,
    sample_seed: int = 0,
    config: dict | None = None,
) -> list[ExperimentReport]:
    """One report per system over an identical test order and sample."""
    if not test_records:
        raise EmptyInput("no test records")
    if sample_size is not None and 0 < sample_size < len(test_records):
        rng = random.Random(sample_seed)
        sample_ids = set(rng.sample(range(len(test_records)), sample_size))
    else:
        sample_ids = set(range(len(test_records)))

    reports = []
    for system in systems:
        all_cases: list[EvaluationCase] = []
        sample_cases: list[EvaluationCase] = []
        for i, record in enumerate(test_records):
            recommendation = system.recommend(record)
            if i in sample_ids:
                case = build_case(record, recommendation, relevance_source)
                sample_cases.append(case)
            else:
                case = EvaluationCase(
                    project=record.id,
                    recommended=recommendation.topics,
                    relevance=[False] * len(recommendation.topics),
                    failed=recommendation.failed,
                )
            all_cases.append(
                EvaluationCase(
                    project=record.id, recommended=[], relevance=[], failed=case.failed
                )
            )
        non_failed = [c for c in sample_cases if not c.failed]
        reports.append(
            ExperimentReport(
                system=system.name,
                fcr_full=fcr(all_cases),
                fcr_sample=fcr(sample_cases),
                asr_at_k=asr_at_k(sample_cases, k) if non_failed else 0.0,
                map_at_k=map_at_k(sample_cases, k) if non_failed else 0.0,
                case_count=len(all_cases),
                sample_count=len(sample_cases),
                config=dict(config or {}, k=k, mode=relevance_source.mode),
            )
        )
    return reports
