"""Curated software-topic knowledge graph, crowd curation, and topic recommenders."""

from .store import KnowledgeGraph, Relationship, RelationType, Topic
from .curation import AcceptancePolicy, CurationEngine, curation_metrics
from .spreading import AugmentationResult, TopicWeights, augment, compute_weights
from .snapshot import decode_snapshot, encode_snapshot, read_snapshot, write_snapshot

__version__ = "0.1.0"

__all__ = [
    "KnowledgeGraph",
    "Topic",
    "RelationType",
    "Relationship",
    "AcceptancePolicy",
    "CurationEngine",
    "curation_metrics",
    "TopicWeights",
    "AugmentationResult",
    "compute_weights",
    "augment",
    "encode_snapshot",
    "decode_snapshot",
    "read_snapshot",
    "write_snapshot",
    "__version__",
]
