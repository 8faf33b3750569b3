"""Desk-scale synthetic corpora with known structure.

Two generators back the directional experiments:

* cold_start_corpus: projects tagged from a fully curated graph, where a
  known slice of projects carries globally unique topics. Collaborative
  filtering has nothing to hang onto for those, while graph augmentation
  still reaches their neighbors.

* planted_corpus: labels carry planted tokens, documents evidence only a
  subset of their theme's labels (owner under-tagging), and the graph
  links each theme's labels into a clique. Ground truth for test
  documents is the full theme, so list quality hinges on recovering the
  unevidenced labels.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import store
from .classify import RepositoryRecord

WORKS_WITH = "works-with"
RELATED_TO = "relates-to"


@dataclass
class ColdStartCorpus:
    graph: store.KnowledgeGraph
    records: list[RepositoryRecord]
    unique_topic_projects: list[str]  # projects whose topics nobody else shares
    isolated_topic_projects: list[str]  # projects seeded on edge-less topics


def cold_start_corpus(
    n_projects: int = 500,
    n_topics: int = 100,
    n_unique: int = 18,
    n_isolated: int = 2,
    seed: int = 0,
) -> ColdStartCorpus:
    """Corpus of n_projects tagged from an n_topics curated graph.

    Topics split into a mainstream block (shared, Zipf-ish usage), a
    reserve block handed to exactly one project each, and a few topics
    left without any graph edges. Mean topics per project lands near 2.5.
    """
    if n_unique + n_isolated >= n_topics // 2:
        raise ValueError("reserve blocks too large for the topic count")
    rng = random.Random(seed)
    graph = store.KnowledgeGraph(snapshot_label=f"cold-start-{seed}")
    names = [f"topic-{i:03d}" for i in range(n_topics)]
    ids = {}
    for name in names:
        # featured: accepted by fiat, so even edge-less topics stay usable seeds
        ids[name] = graph.add_topic(name, origin=store.ORIGIN_FEATURED).id

    works = graph.add_relation_type(WORKS_WITH, bidirectional=True, state=store.ACCEPTED)
    relates = graph.add_relation_type(RELATED_TO, state=store.ACCEPTED)
    n_connected = n_topics - n_isolated
    for i in range(n_connected):
        graph.add_relationship(
            ids[names[i]], works.id, ids[names[(i + 1) % n_connected]], state=store.ACCEPTED
        )
    stride = max(2, n_connected // 3 + 1)
    for i in range(0, n_connected, 2):
        j = (i + stride) % n_connected
        if j != i:
            try:
                graph.add_relationship(ids[names[i]], relates.id, ids[names[j]], state=store.ACCEPTED)
            except store.DuplicateRelationship:
                pass

    mainstream = names[: n_connected - n_unique]
    reserve = names[n_connected - n_unique : n_connected]
    isolated = names[n_connected:]

    records: list[RepositoryRecord] = []
    unique_projects: list[str] = []
    isolated_projects: list[str] = []
    n_special = n_unique + n_isolated
    mainstream_total = int(round(2.5 * n_projects)) - n_special
    per_project = mainstream_total / (n_projects - n_special)
    for p in range(n_projects - n_special):
        size = int(per_project) + (1 if rng.random() < per_project - int(per_project) else 0)
        size = max(1, min(size, len(mainstream)))
        # Zipf-flavored draw: squared random favors low ranks
        chosen: set[str] = set()
        while len(chosen) < size:
            rank = int((rng.random() ** 2) * len(mainstream))
            chosen.add(mainstream[min(rank, len(mainstream) - 1)])
        records.append(RepositoryRecord(id=f"proj-{p:04d}", text="", topics=chosen))
    for i, name in enumerate(reserve):
        pid = f"proj-u{i:03d}"
        records.append(RepositoryRecord(id=pid, text="", topics={name}))
        unique_projects.append(pid)
    for i, name in enumerate(isolated):
        pid = f"proj-i{i:03d}"
        records.append(RepositoryRecord(id=pid, text="", topics={name}))
        isolated_projects.append(pid)
        unique_projects.append(pid)
    rng.shuffle(records)

    usage: dict[str, int] = {}
    for rec in records:
        for name in rec.topics:
            usage[name] = usage.get(name, 0) + 1
    for name in names:
        graph.topics[ids[name]].popularity_count = usage.get(name, 0) * 10

    return ColdStartCorpus(
        graph=graph,
        records=records,
        unique_topic_projects=unique_projects,
        isolated_topic_projects=isolated_projects,
    )


@dataclass
class PlantedCorpus:
    graph: store.KnowledgeGraph
    train: list[RepositoryRecord]
    test: list[RepositoryRecord]
    labels: list[str]
    themes: list[list[str]]


def planted_corpus(
    n_themes: int = 12,
    theme_size: int = 5,
    docs_per_theme: int = 12,
    test_per_theme: int = 5,
    evidenced_train: int = 1,
    evidenced_test: int = 3,
    noise_vocab: int = 150,
    noise_per_doc: tuple[int, int] = (8, 15),
    seed: int = 0,
) -> PlantedCorpus:
    """Theme-structured corpus: planted tokens, under-tagged training labels.

    Training documents evidence (and are labeled with) evidenced_train of
    their theme's labels, rotating so every label gets support. Test
    documents evidence evidenced_test labels but their ground truth is the
    whole theme, so the unevidenced labels are exactly the "missing" ones.
    The graph forms a clique per theme.
    """
    rng = random.Random(seed)
    graph = store.KnowledgeGraph(snapshot_label=f"planted-{seed}")
    works = graph.add_relation_type(WORKS_WITH, bidirectional=True, state=store.ACCEPTED)

    themes: list[list[str]] = []
    label_ids: dict[str, str] = {}
    for t in range(n_themes):
        labels = [f"area{t:02d}-part{j}" for j in range(theme_size)]
        themes.append(labels)
        for name in labels:
            label_ids[name] = graph.add_topic(name, origin=store.ORIGIN_FEATURED).id
        for i in range(theme_size):
            for j in range(i + 1, theme_size):
                graph.add_relationship(
                    label_ids[labels[i]], works.id, label_ids[labels[j]], state=store.ACCEPTED
                )

    token_for = {name: f"tok-{name}" for name in label_ids}
    noise = [f"noise{i:03d}" for i in range(noise_vocab)]

    def make_doc(doc_id: str, theme: list[str], evidenced: list[str], full_truth: bool) -> RepositoryRecord:
        tokens: list[str] = []
        for name in evidenced:
            tokens.extend([token_for[name]] * rng.randint(2, 3))
        tokens.extend(rng.choices(noise, k=rng.randint(*noise_per_doc)))
        rng.shuffle(tokens)
        truth = set(theme) if full_truth else set(evidenced)
        return RepositoryRecord(id=doc_id, text=" ".join(tokens), topics=truth)

    def rotated(theme: list[str], index: int, count: int) -> list[str]:
        start = index % len(theme)
        return [theme[(start + j) % len(theme)] for j in range(count)]

    train: list[RepositoryRecord] = []
    test: list[RepositoryRecord] = []
    for t, theme in enumerate(themes):
        for d in range(docs_per_theme):
            evidenced = rotated(theme, d, evidenced_train)
            train.append(make_doc(f"train-{t:02d}-{d:03d}", theme, evidenced, False))
        for d in range(test_per_theme):
            evidenced = rng.sample(theme, evidenced_test)
            test.append(make_doc(f"test-{t:02d}-{d:03d}", theme, evidenced, True))
    rng.shuffle(train)
    rng.shuffle(test)

    for theme in themes:
        for name in theme:
            graph.topics[label_ids[name]].popularity_count = rng.randint(50, 5000)

    return PlantedCorpus(
        graph=graph, train=train, test=test, labels=sorted(label_ids), themes=themes
    )
