"""Text-based topic prediction: TF-IDF vectors plus per-label classifiers.

Documents are lowercased, whitespace-tokenized, and truncated to a fixed
token budget. The vectorizer keeps the tokens most frequent across
documents; idf uses the smoothed ln((1+N)/(1+df)) + 1 form. Two classifier
families are supported, both one-vs-rest over the label space: logistic
regression (L-BFGS on the regularized log loss) and multinomial naive
Bayes with add-one smoothing. The full recommender takes the classifier's
top picks as seeds and fills the remaining slots by spreading activation.
"""

from __future__ import annotations

import json
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from . import spreading, store
from .errors import (
    EmptyCorpus,
    LabelWithoutSupport,
    DidNotConverge,
    UntrainedModel,
)

MAX_FEATURES = 20_000
MAX_TOKENS = 512
LR_TOL = 1e-4
L2_STRENGTH = 1.0

KIND_LR = "logistic-regression-ovr"
KIND_MNB = "multinomial-naive-bayes"


@dataclass
class RepositoryRecord:
    id: str
    text: str
    topics: set[str]


@dataclass
class RecommenderConfig:
    k: int = 5
    m: int = 3  # classifier picks
    g: int = 2  # graph picks
    alpha: float = 0.5
    beta: float = 0.5

    def __post_init__(self):
        if self.k != self.m + self.g:
            raise ValueError(f"k must equal m + g: k={self.k}, m={self.m}, g={self.g}")
        if min(self.k, self.m, self.g) < 1:
            raise ValueError("k, m, g must all be positive")


@dataclass
class RecommendationItem:
    topic: str  # full name
    score: float
    source: str  # "classifier" | "graph"


@dataclass
class RecommendationList:
    items: list[RecommendationItem]
    partial: bool = False

    @property
    def failed(self) -> bool:
        return not self.items

    @property
    def topics(self) -> list[str]:
        return [item.topic for item in self.items]


def tokenize(text: str, max_tokens: int = MAX_TOKENS) -> list[str]:
    return text.lower().split()[:max_tokens]


@dataclass
class VectorizerModel:
    vocabulary: dict[str, int]
    idf: np.ndarray
    max_features: int = MAX_FEATURES
    max_tokens: int = MAX_TOKENS

    def transform(self, text: str) -> np.ndarray:
        """Raw term counts times idf over the learned vocabulary."""
        vec = np.zeros(len(self.vocabulary))
        for token, count in Counter(tokenize(text, self.max_tokens)).items():
            idx = self.vocabulary.get(token)
            if idx is not None:
                vec[idx] = count
        return vec * self.idf

    def transform_corpus(self, records: Sequence[RepositoryRecord]) -> np.ndarray:
        return np.stack([self.transform(rec.text) for rec in records])


def fit_vectorizer(
    corpus: Sequence[RepositoryRecord],
    max_features: int = MAX_FEATURES,
    max_tokens: int = MAX_TOKENS,
) -> VectorizerModel:
    """Select the top tokens by document frequency and fit smoothed idf."""
    if not corpus:
        raise EmptyCorpus("cannot fit a vectorizer on an empty corpus")
    df: Counter[str] = Counter()
    for rec in corpus:
        df.update(set(tokenize(rec.text, max_tokens)))
    kept = sorted(df.items(), key=lambda kv: (-kv[1], kv[0]))[:max_features]
    vocabulary = {token: i for i, token in enumerate(sorted(token for token, _ in kept))}
    n_docs = len(corpus)
    idf = np.zeros(len(vocabulary))
    for token, idx in vocabulary.items():
        idf[idx] = np.log((1 + n_docs) / (1 + df[token])) + 1.0
    return VectorizerModel(
        vocabulary=vocabulary, idf=idf, max_features=max_features, max_tokens=max_tokens
    )


# --- logistic regression ---------------------------------------------------


def logistic_loss_grad(
    params: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float = L2_STRENGTH
) -> tuple[float, np.ndarray]:
    """L2-regularized binary log loss and its gradient.

    params holds the weight vector followed by the intercept; the
    intercept is not penalized.
    """
    w, b = params[:-1], params[-1]
    z = X @ w + b
    # log(1 + exp(-s)) via logaddexp for numerical stability
    margins = np.where(y == 1, z, -z)
    loss = np.logaddexp(0.0, -margins).sum() + 0.5 * l2 * (w @ w)
    p = 1.0 / (1.0 + np.exp(-z))
    residual = p - y
    grad = np.concatenate([X.T @ residual + l2 * w, [residual.sum()]])
    return loss, grad


def _fit_logistic(X: np.ndarray, y: np.ndarray, tol: float = LR_TOL) -> np.ndarray:
    x0 = np.zeros(X.shape[1] + 1)
    res = minimize(
        logistic_loss_grad,
        x0,
        args=(X, y),
        jac=True,
        method="L-BFGS-B",
        options={"gtol": tol, "maxiter": 2000},
    )
    if not res.success:
        warnings.warn(f"logistic fit stopped early: {res.message}", DidNotConverge)
    return res.x


# --- multinomial naive Bayes -------------------------------------------------


@dataclass
class _NaiveBayesLabel:
    log_prior_pos: float
    log_prior_neg: float
    log_lik_pos: np.ndarray
    log_lik_neg: np.ndarray


@dataclass
class ClassifierModel:
    kind: str
    label_space: list[str]
    lr_params: dict[str, np.ndarray] = field(default_factory=dict)
    nb_params: dict[str, _NaiveBayesLabel] = field(default_factory=dict)

    def predict_one(self, label: str, vec: np.ndarray) -> float:
        if self.kind == KIND_LR:
            params = self.lr_params[label]
            z = vec @ params[:-1] + params[-1]
            return float(1.0 / (1.0 + np.exp(-z)))
        nb = self.nb_params[label]
        z = (
            nb.log_prior_pos
            + vec @ nb.log_lik_pos
            - nb.log_prior_neg
            - vec @ nb.log_lik_neg
        )
        return float(1.0 / (1.0 + np.exp(-z)))


def train(
    kind: str,
    corpus: Sequence[RepositoryRecord],
    vectorizer: VectorizerModel,
    label_space: Sequence[str] | None = None,
) -> ClassifierModel:
    """Fit one-vs-rest models for every label in the space."""
    if not corpus:
        raise EmptyCorpus("cannot train on an empty corpus")
    if kind not in (KIND_LR, KIND_MNB):
        raise ValueError(f"unknown classifier kind: {kind!r}")
    labels = sorted(label_space) if label_space is not None else sorted(
        {t for rec in corpus for t in rec.topics}
    )
    support = Counter(t for rec in corpus for t in rec.topics if t in set(labels))
    for label in labels:
        if support[label] == 0:
            raise LabelWithoutSupport(f"label has no positive documents: {label}")

    X = vectorizer.transform_corpus(corpus)
    model = ClassifierModel(kind=kind, label_space=list(labels))
    if kind == KIND_LR:
        for label in labels:
            y = np.array([1.0 if label in rec.topics else 0.0 for rec in corpus])
            model.lr_params[label] = _fit_logistic(X, y)
        return model

    smoothing = 1.0
    vocab_size = X.shape[1]
    n_docs = len(corpus)
    for label in labels:
        mask = np.array([label in rec.topics for rec in corpus])
        pos, neg = X[mask], X[~mask]
        n_pos = int(mask.sum())
        # add-one smoothed token likelihoods; the smoothed masses sum to 1
        pos_counts = pos.sum(axis=0) + smoothing
        neg_counts = neg.sum(axis=0) + smoothing
        model.nb_params[label] = _NaiveBayesLabel(
            log_prior_pos=np.log((n_pos + smoothing) / (n_docs + 2 * smoothing)),
            log_prior_neg=np.log((n_docs - n_pos + smoothing) / (n_docs + 2 * smoothing)),
            log_lik_pos=np.log(pos_counts / pos_counts.sum()),
            log_lik_neg=np.log(neg_counts / neg_counts.sum()),
        )
    return model


def predict_proba(
    model: ClassifierModel, vectorizer: VectorizerModel, text: str
) -> dict[str, float]:
    """One probability per label, deterministic for a fixed model and text."""
    if model is None or not model.label_space:
        raise UntrainedModel("classifier has no trained labels")
    vec = vectorizer.transform(text)
    return {label: model.predict_one(label, vec) for label in model.label_space}


def top_picks(probabilities: dict[str, float], m: int) -> list[tuple[str, float]]:
    """Top-m labels by probability, ties broken lexicographically."""
    ranked = sorted(probabilities.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:m]


def compose_recommendation(
    picks: Sequence[tuple[str, float]],
    augmented: Sequence[tuple[str, float]],
    g: int,
) -> RecommendationList:
    """Classifier picks first, then up to g augmentation picks.

    The list is flagged partial when augmentation could not fill all
    g slots.
    """
    items = [RecommendationItem(topic=t, score=p, source="classifier") for t, p in picks]
    for topic, score in augmented[:g]:
        items.append(RecommendationItem(topic=topic, score=score, source="graph"))
    return RecommendationList(items=items, partial=len(augmented) < g)


def graph_augmented_picks(
    picks: Sequence[tuple[str, float]],
    weights: spreading.TopicWeights,
    graph: store.KnowledgeGraph,
    g: int,
) -> list[tuple[str, float]]:
    """Spread from the picked topics; returns (full name, score) candidates.

    Picks missing from the graph contribute no activation. Candidates never
    include any pick.
    """
    seed: dict[str, float] = {}
    for name, prob in picks:
        topic = graph.topic_by_name(name)
        if topic is not None:
            seed[topic.id] = min(max(prob, 1e-12), 1.0)
    if not seed:
        return []
    # over-fetch so filtering pick collisions can never starve the g slots
    result = spreading.augment(seed, weights, graph, k=g + len(picks))
    pick_names = {name for name, _ in picks}
    return [
        (graph.topics[tid].full_name, score)
        for tid, score in result.ranked
        if graph.topics[tid].full_name not in pick_names
    ]


def recommend_full(
    text: str,
    model: ClassifierModel,
    vectorizer: VectorizerModel,
    weights: spreading.TopicWeights,
    graph: store.KnowledgeGraph,
    cfg: RecommenderConfig | None = None,
) -> RecommendationList:
    """Full top-k list: m classifier picks plus g graph-augmented topics."""
    cfg = cfg or RecommenderConfig()
    probabilities = predict_proba(model, vectorizer, text)
    picks = top_picks(probabilities, cfg.m)
    augmented = graph_augmented_picks(picks, weights, graph, cfg.g)
    return compose_recommendation(picks, augmented, cfg.g)


# --- model archive ------------------------------------------------------------

ARCHIVE_FORMAT = "kgrec-model"
ARCHIVE_VERSION = 1


def save_model(path, model: ClassifierModel, vectorizer: VectorizerModel) -> None:
    """Bundle vectorizer and per-label parameters into one JSON file."""
    payload: dict = {
        "format": ARCHIVE_FORMAT,
        "version": ARCHIVE_VERSION,
        "kind": model.kind,
        "label_space": model.label_space,
        "vectorizer": {
            "vocabulary": model_vocab_list(vectorizer),
            "idf": vectorizer.idf.tolist(),
            "max_features": vectorizer.max_features,
            "max_tokens": vectorizer.max_tokens,
        },
    }
    if model.kind == KIND_LR:
        payload["lr_params"] = {k: v.tolist() for k, v in model.lr_params.items()}
    else:
        payload["nb_params"] = {
            label: {
                "log_prior_pos": nb.log_prior_pos,
                "log_prior_neg": nb.log_prior_neg,
                "log_lik_pos": nb.log_lik_pos.tolist(),
                "log_lik_neg": nb.log_lik_neg.tolist(),
            }
            for label, nb in model.nb_params.items()
        }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def model_vocab_list(vectorizer: VectorizerModel) -> list[str]:
    ordered = [""] * len(vectorizer.vocabulary)
    for token, idx in vectorizer.vocabulary.items():
        ordered[idx] = token
    return ordered


def load_model(path) -> tuple[ClassifierModel, VectorizerModel]:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != ARCHIVE_FORMAT or payload.get("version") != ARCHIVE_VERSION:
        raise UntrainedModel(f"not a recognizable model archive: {path}")
    vec_data = payload["vectorizer"]
    vectorizer = VectorizerModel(
        vocabulary={token: i for i, token in enumerate(vec_data["vocabulary"])},
        idf=np.array(vec_data["idf"]),
        max_features=vec_data["max_features"],
        max_tokens=vec_data["max_tokens"],
    )
    model = ClassifierModel(kind=payload["kind"], label_space=payload["label_space"])
    if model.kind == KIND_LR:
        model.lr_params = {k: np.array(v) for k, v in payload["lr_params"].items()}
    else:
        model.nb_params = {
            label: _NaiveBayesLabel(
                log_prior_pos=nb["log_prior_pos"],
                log_prior_neg=nb["log_prior_neg"],
                log_lik_pos=np.array(nb["log_lik_pos"]),
                log_lik_neg=np.array(nb["log_lik_neg"]),
            )
            for label, nb in payload["nb_params"].items()
        }
    return model, vectorizer


def load_dataset(path) -> list[RepositoryRecord]:
    """Newline-delimited {id, text, topics[]} records."""
    records: list[RepositoryRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            rec = json.loads(line)
            records.append(
                RepositoryRecord(
                    id=rec["id"], text=rec["text"], topics=set(rec.get("topics", ()))
                )
            )
    return records


def save_dataset(path, records: Iterable[RepositoryRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {"id": rec.id, "text": rec.text, "topics": sorted(rec.topics)},
                    ensure_ascii=False,
                )
                + "\n"
            )
