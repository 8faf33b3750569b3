"""Operator command line: snapshots, weights, training, recommendation, serving.

Machine-readable results go to stdout; diagnostics go to stderr. Every
domain failure exits nonzero with a one-line reason.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import baselines, classify, evaluation, popularity, reporting, seed, spreading
from .errors import KgrecError
from .persistence import DurableStore
from .snapshot import read_snapshot, write_snapshot

SNAPSHOT_ENV = "KGREC_SNAPSHOT"


def _load_engine(snapshot: str | None):
    """Engine from --snapshot, $KGREC_SNAPSHOT, or the shipped starter graph."""
    path = snapshot or os.environ.get(SNAPSHOT_ENV)
    if path:
        return read_snapshot(path)
    return read_snapshot(popularity.seed_snapshot_path())


def _load_graph(snapshot: str | None, popularity_cache: str | None):
    engine = _load_engine(snapshot)
    graph = engine.graph
    if popularity_cache:
        cache = popularity.load_cache(popularity_cache)
        popularity.apply_counts(graph, cache)
    return graph


snapshot_option = click.option(
    "--snapshot",
    type=click.Path(),
    default=None,
    envvar=SNAPSHOT_ENV,
    help="Snapshot file (defaults to $KGREC_SNAPSHOT, then the shipped starter graph).",
)
cache_option = click.option(
    "--popularity-cache", type=click.Path(), default=None, help="Per-topic project count cache."
)


@click.group()
def main():
    """Curated topic graph tooling."""


# --- kg import/export ------------------------------------------------------


@main.group()
def kg():
    """Snapshot import/export."""


@kg.command("import")
@snapshot_option
@click.option("--store", "store_dir", type=click.Path(), default=None, help="Initialize a durable store here.")
def kg_import(snapshot, store_dir):
    """Validate a snapshot; optionally initialize a durable store from it."""
    path = snapshot or os.environ.get(SNAPSHOT_ENV) or str(popularity.seed_snapshot_path())
    text = Path(path).read_text(encoding="utf-8")
    engine = _load_engine(path)
    graph = engine.graph
    if store_dir:
        DurableStore.create(store_dir, text)
        click.echo(f"initialized store at {store_dir}", err=True)
    click.echo(
        json.dumps(
            {
                "label": graph.snapshot_label,
                "topics": len(graph.topics),
                "relation_types": len(graph.relation_types),
                "relationships": len(graph.relationships),
                "votes": sum(len(v) for v in engine.votes.values()),
            }
        )
    )


@kg.command("export")
@click.option("--store", "store_dir", type=click.Path(), default=None, help="Durable store to export.")
@snapshot_option
@click.option("--output", type=click.Path(), default=None, help="Write here instead of stdout.")
@click.option("--audit", "audit_path", type=click.Path(), default=None, help="Also write the audit event stream.")
def kg_export(store_dir, snapshot, output, audit_path):
    """Write the current graph (store or snapshot) as a snapshot stream."""
    if store_dir:
        durable = DurableStore.open(store_dir)
        text = durable.export_snapshot()
        audit = durable.export_audit()
    else:
        engine = _load_engine(snapshot)
        from .snapshot import export_engine

        text = export_engine(engine)
        audit = "".join(json.dumps(e, ensure_ascii=False) + "\n" for e in engine.events)
    if audit_path:
        Path(audit_path).write_text(audit, encoding="utf-8")
        click.echo(f"audit stream written to {audit_path}", err=True)
    if output:
        Path(output).write_text(text, encoding="utf-8")
        click.echo(f"snapshot written to {output}", err=True)
    else:
        click.echo(text, nl=False)


# --- weights ------------------------------------------------------------------


@main.group()
def weights():
    """Topic weight table."""


@weights.command("compute")
@snapshot_option
@cache_option
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--beta", type=float, default=0.5, show_default=True)
@click.option("--output", type=click.Path(), default=None)
def weights_compute(snapshot, popularity_cache, alpha, beta, output):
    """Two-column table: topic full name and its weight."""
    graph = _load_graph(snapshot, popularity_cache)
    table = spreading.export_weights(spreading.compute_weights(graph, alpha, beta), graph)
    if output:
        Path(output).write_text(table, encoding="utf-8")
        click.echo(f"weights written to {output}", err=True)
    else:
        click.echo(table, nl=False)


# --- train ---------------------------------------------------------------------


@main.command()
@click.option("--dataset", type=click.Path(exists=True), required=True, help="NDJSON {id, text, topics[]}.")
@click.option("--kind", type=click.Choice(["lr", "mnb"]), default="lr", show_default=True)
@click.option("--model-out", type=click.Path(), required=True)
@click.option("--max-features", type=int, default=classify.MAX_FEATURES, show_default=True)
@click.option("--max-tokens", type=int, default=classify.MAX_TOKENS, show_default=True)
def train(dataset, kind, model_out, max_features, max_tokens):
    """Fit the vectorizer and a classifier; write a model archive."""
    records = classify.load_dataset(dataset)
    vectorizer = classify.fit_vectorizer(records, max_features=max_features, max_tokens=max_tokens)
    kind_name = classify.KIND_LR if kind == "lr" else classify.KIND_MNB
    model = classify.train(kind_name, records, vectorizer)
    classify.save_model(model_out, model, vectorizer)
    click.echo(
        json.dumps(
            {
                "kind": kind_name,
                "documents": len(records),
                "labels": len(model.label_space),
                "features": len(vectorizer.vocabulary),
                "model": str(model_out),
            }
        )
    )


# --- augment ------------------------------------------------------------------


@main.command()
@click.option("--topics", required=True, help="Comma-separated seed topic names.")
@click.option("--k", type=int, default=5, show_default=True)
@snapshot_option
@cache_option
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--beta", type=float, default=0.5, show_default=True)
def augment(topics, k, snapshot, popularity_cache, alpha, beta):
    """Rank up to k topics adjacent to the seeds; one 'name<TAB>score' per line."""
    graph = _load_graph(snapshot, popularity_cache)
    w = spreading.compute_weights(graph, alpha, beta)
    seeds = {name.strip(): 1.0 for name in topics.split(",") if name.strip()}
    result = spreading.augment_by_name(seeds, w, graph, k)
    if result.failed:
        click.echo("no recommendations (seed set has no outside neighbors)", err=True)
        sys.exit(3)
    for tid, score in result.ranked:
        click.echo(f"{graph.topics[tid].full_name}\t{score:.6f}")


# --- recommend --------------------------------------------------------------------


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--text", default=None, help="Repository text (inline).")
@click.option("--text-file", type=click.Path(exists=True), default=None)
@click.option("--m", type=int, default=3, show_default=True, help="Classifier picks.")
@click.option("--g", type=int, default=2, show_default=True, help="Graph picks.")
@snapshot_option
@cache_option
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--beta", type=float, default=0.5, show_default=True)
def recommend(model_path, text, text_file, m, g, snapshot, popularity_cache, alpha, beta):
    """Full top-(m+g) recommendation for a repository's text."""
    if text is None and text_file is None:
        raise click.UsageError("one of --text / --text-file is required")
    if text is None:
        text = Path(text_file).read_text(encoding="utf-8")
    model, vectorizer = classify.load_model(model_path)
    graph = _load_graph(snapshot, popularity_cache)
    w = spreading.compute_weights(graph, alpha, beta)
    cfg = classify.RecommenderConfig(k=m + g, m=m, g=g, alpha=alpha, beta=beta)
    result = classify.recommend_full(text, model, vectorizer, w, graph, cfg)
    if result.partial:
        click.echo("partial list: augmentation could not fill every slot", err=True)
    for rank, item in enumerate(result.items, start=1):
        click.echo(f"{rank}\t{item.topic}\t{item.score:.6f}\t{item.source}")


# --- evaluate --------------------------------------------------------------------

SYSTEM_CHOICES = ("lr", "mnb", "kgrec", "topfilter", "lr+kgrec", "lr+topfilter", "mnb+kgrec", "mnb+topfilter")


def _augment_seeds(record: classify.RepositoryRecord) -> dict[str, float]:
    """Hold out the lexicographically last topic so hits are measurable."""
    names = sorted(record.topics)
    chosen = names[:-1] if len(names) > 1 else names
    return {name: 1.0 for name in chosen}


def _build_systems(tokens, train_records, graph, w, k, m, g):
    matrix = baselines.ProjectTopicMatrix.from_records(train_records)
    cfg = classify.RecommenderConfig(k=m + g, m=m, g=g)
    trained: dict[str, tuple[classify.ClassifierModel, classify.VectorizerModel]] = {}

    def classifier(kind_token):
        if kind_token not in trained:
            vectorizer = classify.fit_vectorizer(train_records)
            kind = classify.KIND_LR if kind_token == "lr" else classify.KIND_MNB
            trained[kind_token] = (classify.train(kind, train_records, vectorizer), vectorizer)
        return trained[kind_token]

    systems = []
    for token in tokens:
        if token in ("lr", "mnb"):
            model, vectorizer = classifier(token)

            def rec(record, model=model, vectorizer=vectorizer):
                probs = classify.predict_proba(model, vectorizer, record.text)
                picks = classify.top_picks(probs, k)
                items = [
                    classify.RecommendationItem(topic=t, score=p, source="classifier")
                    for t, p in picks
                ]
                return classify.RecommendationList(items=items)

        elif token == "kgrec":

            def rec(record):
                seeds = _augment_seeds(record)
                known = {
                    graph.topic_by_name(n).id: p
                    for n, p in seeds.items()
                    if graph.topic_by_name(n) is not None
                }
                if not known:
                    return classify.RecommendationList(items=[])
                result = spreading.augment(known, w, graph, k)
                items = [
                    classify.RecommendationItem(
                        topic=graph.topics[tid].full_name, score=s, source="graph"
                    )
                    for tid, s in result.ranked
                ]
                return classify.RecommendationList(items=items)

        elif token == "topfilter":

            def rec(record):
                result = baselines.topfilter_augment(
                    set(_augment_seeds(record)),
                    matrix,
                    k,
                    exclude_project=record.id if record.id in matrix.topics_by_project else None,
                )
                items = [
                    classify.RecommendationItem(topic=t, score=s, source="collaborative")
                    for t, s in result.ranked
                ]
                return classify.RecommendationList(items=items)

        else:
            kind_token, augmenter = token.split("+", 1)
            model, vectorizer = classifier(kind_token)

            def rec(record, model=model, vectorizer=vectorizer, augmenter=augmenter):
                probs = classify.predict_proba(model, vectorizer, record.text)
                picks = classify.top_picks(probs, cfg.m)
                return baselines.stack(
                    picks, augmenter, cfg, graph=graph, weights=w, matrix=matrix
                )

        systems.append(evaluation.System(name=token, recommend=rec))
    return systems


@main.command()
@click.option("--dataset", type=click.Path(exists=True), required=True)
@click.option("--systems", default="lr,lr+kgrec", show_default=True, help="Comma list: " + ",".join(SYSTEM_CHOICES))
@click.option("--judgments", type=click.Path(exists=True), default=None, help="Manual-mode judgments file.")
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--m", type=int, default=3, show_default=True)
@click.option("--g", type=int, default=2, show_default=True)
@click.option("--seed", "seed_value", type=int, default=0, show_default=True)
@click.option("--train-fraction", type=float, default=0.8, show_default=True)
@click.option("--sample", type=int, default=None, help="Judge only a sampled subset.")
@click.option("--outdir", type=click.Path(), default="eval-out", show_default=True)
@snapshot_option
@cache_option
def evaluate(dataset, systems, judgments, k, m, g, seed_value, train_fraction, sample, outdir, snapshot, popularity_cache):
    """Split, run each system, and write the comparison table and figures."""
    tokens = [t.strip() for t in systems.split(",") if t.strip()]
    for token in tokens:
        if token not in SYSTEM_CHOICES:
            raise click.UsageError(f"unknown system {token!r}; choose from {', '.join(SYSTEM_CHOICES)}")
    records = classify.load_dataset(dataset)
    train_records, test_records = evaluation.split(records, train_fraction, seed_value)
    graph = _load_graph(snapshot, popularity_cache)
    w = spreading.compute_weights(graph)
    relevance = evaluation.load_judgments(judgments) if judgments else evaluation.GroundTruthRelevance()
    built = _build_systems(tokens, train_records, graph, w, k, m, g)
    reports = evaluation.run_experiment(
        built,
        test_records,
        relevance,
        k=k,
        sample_size=sample,
        sample_seed=seed_value,
        config={"m": m, "g": g, "seed": seed_value, "dataset": str(dataset)},
    )
    paths = reporting.write_report_files(outdir, reports)
    click.echo(reporting.render_table(reports), nl=False)
    click.echo(
        "wrote " + ", ".join(str(p) for p in paths.values()),
        err=True,
    )


# --- popularity --------------------------------------------------------------------


@main.group("popularity")
def popularity_group():
    """Per-topic project counts."""


@popularity_group.command("fetch")
@click.option("--topics", default=None, help="Comma-separated names (default: snapshot's accepted topics).")
@snapshot_option
@cache_option
@click.option("--live", is_flag=True, help="Query the live API (default: cache only).")
@click.option("--github-token", default=None, envvar="GITHUB_TOKEN")
@click.option("--output", type=click.Path(), default=None, help="Where to save the refreshed cache.")
def popularity_fetch(topics, snapshot, popularity_cache, live, github_token, output):
    """Resolve one count per topic from the live API and/or the cache file."""
    if topics:
        names = [t.strip() for t in topics.split(",") if t.strip()]
    else:
        graph = _load_graph(snapshot, None)
        names = sorted(t.full_name for t in graph.topics.values() if t.state == "accepted")
    fetch_fn = popularity.github_count_fetcher(token=github_token) if live else None
    cache_path = popularity_cache or (None if live else popularity.default_cache_path())
    cache = popularity.fetch_popularity(names, cache_path=cache_path, fetch_fn=fetch_fn)
    if output:
        popularity.save_cache(output, cache)
        click.echo(f"cache written to {output}", err=True)
    click.echo(json.dumps({"source": cache.source, "topics": len(cache.counts), "counts": cache.counts}))


# --- serve ---------------------------------------------------------------------------


@main.command()
@click.option("--store", "store_dir", type=click.Path(), required=True, help="Durable store directory.")
@snapshot_option
@click.option("--listen", default="127.0.0.1:8571", show_default=True)
@cache_option
@click.option("--model", "model_specs", multiple=True, help="NAME=PATH model archive to expose.")
@click.option("--maintainer-token", default="maintainer", show_default=True)
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--beta", type=float, default=0.5, show_default=True)
def serve(store_dir, snapshot, listen, popularity_cache, model_specs, maintainer_token, alpha, beta):
    """Serve the HTTP API, creating the store from a snapshot if needed."""
    from .service import ServiceConfig, serve as run_service

    store_path = Path(store_dir)
    if (store_path / "base.ndjson").exists():
        durable = DurableStore.open(store_path)
    else:
        path = snapshot or os.environ.get(SNAPSHOT_ENV) or str(popularity.seed_snapshot_path())
        durable = DurableStore.create(store_path, Path(path).read_text(encoding="utf-8"))
    if popularity_cache:
        cache = popularity.load_cache(popularity_cache)
        with durable.lock:
            popularity.apply_counts(durable.engine.graph, cache)
    model_paths = {}
    for spec in model_specs:
        name, _, path = spec.partition("=")
        if not path:
            raise click.UsageError(f"--model expects NAME=PATH, got {spec!r}")
        model_paths[name] = path
    config = ServiceConfig(
        maintainer_token=maintainer_token, alpha=alpha, beta=beta, model_paths=model_paths
    )
    click.echo(f"serving on {listen} (store: {store_dir})", err=True)
    run_service(durable, listen, config)


def entrypoint(argv=None) -> int:
    try:
        main.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        return 130
    except KgrecError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(entrypoint())
