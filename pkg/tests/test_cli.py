"""Operator CLI: subcommands, machine-readable output, exit codes."""

import json
import math
from collections import defaultdict

import pytest
from click.testing import CliRunner

from kgrec.classify import RepositoryRecord, save_dataset
from kgrec.cli import main
from kgrec.popularity import seed_snapshot_path
from kgrec.synthetic import planted_corpus


@pytest.fixture()
def runner():
    return CliRunner()


def test_kg_import_summary(runner):
    result = runner.invoke(main, ["kg", "import"])
    assert result.exit_code == 0, result.output
    summary = json.loads(result.stdout)
    assert summary["topics"] == 72 and summary["relationships"] == 41


def test_kg_import_export_round_trip(runner, tmp_path):
    out = tmp_path / "exported.ndjson"
    result = runner.invoke(main, ["kg", "export", "--output", str(out)])
    assert result.exit_code == 0
    assert out.read_text() == seed_snapshot_path().read_text()


def test_kg_export_from_store(runner, tmp_path):
    store_dir = tmp_path / "store"
    result = runner.invoke(main, ["kg", "import", "--store", str(store_dir)])
    assert result.exit_code == 0
    audit = tmp_path / "audit.ndjson"
    result = runner.invoke(
        main, ["kg", "export", "--store", str(store_dir), "--audit", str(audit)]
    )
    assert result.exit_code == 0
    assert result.stdout.splitlines()[0].startswith('{"kind": "snapshot"')
    assert audit.exists()


def test_augment_matches_library_oracle(runner):
    result = runner.invoke(main, ["augment", "--topics", "django,python", "--k", "5"])
    assert result.exit_code == 0, result.output
    rows = [line.split("\t") for line in result.stdout.strip().splitlines()]

    # oracle: recompute over the shipped snapshot by hand
    from kgrec.snapshot import read_snapshot
    from kgrec.spreading import compute_weights

    g = read_snapshot(seed_snapshot_path()).graph
    w = compute_weights(g)
    seeds = {g.topic_by_name("django").id, g.topic_by_name("python").id}
    adjacency = defaultdict(set)
    for rel in g.relationships.values():
        if rel.state == "accepted":
            adjacency[rel.subject].add(rel.object)
            adjacency[rel.object].add(rel.subject)
    scores = {}
    for tid in g.topics:
        if tid in seeds:
            continue
        mass = sum(1.0 for s in seeds if tid in adjacency[s])
        if mass:
            scores[g.topics[tid].full_name] = w.weights[tid] * mass
    expected = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))[:5]
    assert [(name, float(f"{score:.6f}")) for name, score in expected] == [
        (name, float(score)) for name, score in rows
    ]


def test_augment_unknown_seed_fails_nonzero(runner):
    result = runner.invoke(main, ["augment", "--topics", "not-a-topic"])
    assert result.exit_code != 0


def test_unknown_flag_shows_usage(runner):
    result = runner.invoke(main, ["augment", "--nonsense"])
    assert result.exit_code != 0
    assert "no such option" in result.stderr.lower() or "usage" in result.stderr.lower()


def test_weights_compute_two_columns(runner, tmp_path):
    out = tmp_path / "weights.tsv"
    result = runner.invoke(main, ["weights", "compute", "--output", str(out)])
    assert result.exit_code == 0
    lines = [line.split("\t") for line in out.read_text().strip().splitlines()]
    assert len(lines) == 72
    assert all(len(parts) == 2 for parts in lines)
    values = [float(v) for _, v in lines]
    assert values == sorted(values, reverse=True)


def test_train_recommend_flow(runner, tmp_path):
    corpus = planted_corpus(n_themes=4, docs_per_theme=10, test_per_theme=2, seed=5)
    dataset = tmp_path / "train.ndjson"
    save_dataset(dataset, corpus.train)
    snapshot = tmp_path / "graph.ndjson"
    from kgrec.snapshot import write_snapshot

    write_snapshot(snapshot, corpus.graph)
    model_out = tmp_path / "model.json"
    result = runner.invoke(
        main,
        ["train", "--dataset", str(dataset), "--kind", "lr", "--model-out", str(model_out)],
    )
    assert result.exit_code == 0, result.output
    summary = json.loads(result.stdout)
    assert summary["labels"] == 20 and model_out.exists()

    doc = corpus.test[0]
    result = runner.invoke(
        main,
        [
            "recommend",
            "--model", str(model_out),
            "--text", doc.text,
            "--snapshot", str(snapshot),
        ],
    )
    assert result.exit_code == 0, result.output
    rows = [line.split("\t") for line in result.stdout.strip().splitlines()]
    assert 1 <= len(rows) <= 5
    assert rows[0][3] == "classifier"
    recommended = [r[1] for r in rows]
    assert len(set(recommended)) == len(recommended)


def test_evaluate_writes_table_and_figures(runner, tmp_path):
    corpus = planted_corpus(n_themes=4, docs_per_theme=10, test_per_theme=3, seed=6)
    dataset = tmp_path / "all.ndjson"
    save_dataset(dataset, corpus.train + corpus.test)
    snapshot = tmp_path / "graph.ndjson"
    from kgrec.snapshot import write_snapshot

    write_snapshot(snapshot, corpus.graph)
    outdir = tmp_path / "report"
    result = runner.invoke(
        main,
        [
            "evaluate",
            "--dataset", str(dataset),
            "--systems", "lr,lr+kgrec",
            "--snapshot", str(snapshot),
            "--outdir", str(outdir),
            "--seed", "3",
        ],
    )
    assert result.exit_code == 0, result.output
    assert "asr@5" in result.stdout
    for name in ("report.txt", "report.csv", "report_quality.png", "report_fcr.png"):
        assert (outdir / name).stat().st_size > 0
    csv_lines = (outdir / "report.csv").read_text().splitlines()
    assert len(csv_lines) == 3  # header + two systems


def test_evaluate_rejects_unknown_system(runner, tmp_path):
    dataset = tmp_path / "tiny.ndjson"
    save_dataset(dataset, [RepositoryRecord(f"p{i}", "x", {"t"}) for i in range(4)])
    result = runner.invoke(main, ["evaluate", "--dataset", str(dataset), "--systems", "wat"])
    assert result.exit_code != 0


def test_popularity_fetch_from_fixture(runner):
    result = runner.invoke(main, ["popularity", "fetch", "--topics", "awesome,django"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert payload["source"] == "cache-file"
    assert payload["counts"]["awesome"] == 3863


def test_popularity_fetch_writes_cache(runner, tmp_path):
    out = tmp_path / "counts.json"
    result = runner.invoke(main, ["popularity", "fetch", "--output", str(out)])
    assert result.exit_code == 0
    from kgrec.popularity import load_cache

    cache = load_cache(out)
    assert len(cache.counts) == 72  # every accepted starter topic


def test_snapshot_env_var_default(runner, tmp_path, monkeypatch):
    snapshot = tmp_path / "env.ndjson"
    from kgrec import store
    from kgrec.snapshot import write_snapshot

    g = store.KnowledgeGraph(snapshot_label="from-env")
    a = g.add_topic("envy-a", origin=store.ORIGIN_FEATURED)
    b = g.add_topic("envy-b", origin=store.ORIGIN_FEATURED)
    verb = g.add_relation_type("relates-to", state=store.ACCEPTED)
    g.add_relationship(a.id, verb.id, b.id, state=store.ACCEPTED)
    write_snapshot(snapshot, g)
    monkeypatch.setenv("KGREC_SNAPSHOT", str(snapshot))
    result = runner.invoke(main, ["kg", "import"])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["topics"] == 2
