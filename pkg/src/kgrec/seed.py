"""Shipped starter graph: 13 relation types and 41 sample relationships.

Every relation type comes with a few exemplar triples. Relationships are
accepted through three unanimous starter votes so the shipped snapshot is
immediately usable for adjacency queries and augmentation.
"""

from __future__ import annotations

from .curation import AcceptancePolicy, CurationEngine
from .snapshot import export_engine

# verb, definition, bidirectional
RELATION_TYPES: list[tuple[str, str, bool]] = [
    ("is-a", "Places the subject under the general category named by the object.", False),
    ("is-used-in-field", "Ties the subject to the field or application area it serves.", False),
    ("provides-functionality", "States a functional capability the subject offers.", False),
    ("works-with", "Links technologies commonly used together; holds in both directions.", True),
    ("is-subset-of", "Nests the subject inside the broader concept named by the object.", False),
    ("is-based-on", "Marks the object as the foundation the subject is built on.", False),
    ("is-focused-on", "Highlights a concern the subject concentrates on.", False),
    ("has-property", "Attaches a widely recognized attribute to the subject.", False),
    ("overlaps-with", "Connects topics sharing common ground without depending on each other; holds in both directions.", True),
    ("provides-product", "Names a product created and offered by the subject.", False),
    ("provided-by", "Points from a product back to the entity offering it.", False),
    ("maintained-by", "Names the authority responsible for maintaining the subject.", False),
    ("has-license", "Records the license under which the subject is distributed.", False),
]

TRIPLES: list[tuple[str, str, str]] = [
    ("django", "is-a", "framework"),
    ("android", "is-a", "operating-system"),
    ("atom", "is-a", "text-editor"),
    ("django", "is-used-in-field", "web-development"),
    ("3d", "is-used-in-field", "graphics"),
    ("azure", "is-used-in-field", "cloud-computing"),
    ("django", "provides-functionality", "backend"),
    ("auth0", "provides-functionality", "authentication"),
    ("blockchain", "provides-functionality", "decentralization"),
    ("django", "works-with", "python"),
    ("blockchain", "works-with", "cryptography"),
    ("kubernetes", "works-with", "docker"),
    ("image-processing", "is-subset-of", "machine-learning"),
    ("continuous-deployment", "is-subset-of", "cicd"),
    ("user-experience", "is-subset-of", "ui-ux"),
    ("deep-learning", "is-subset-of", "neural-network"),
    ("archlinux", "is-based-on", "linux"),
    ("xmake", "is-based-on", "lua"),
    ("reactiveui", "is-based-on", "mvvm"),
    ("agile", "is-focused-on", "speed"),
    ("end-to-end-encryption", "is-focused-on", "privacy"),
    ("neo4j", "is-focused-on", "scalability"),
    ("agile", "is-focused-on", "flexibility"),
    ("mysql", "has-property", "open-source"),
    ("anki", "has-property", "cross-platform"),
    ("elite-dangerous", "has-property", "multiplayer"),
    ("robotics", "overlaps-with", "ai"),
    ("data-science", "overlaps-with", "ai"),
    ("nlp", "overlaps-with", "machine-learning"),
    ("google", "provides-product", "flutter"),
    ("amazon", "provides-product", "aws"),
    ("mediawiki", "provides-product", "wikipedia"),
    ("atom", "provided-by", "github"),
    ("flutter", "provided-by", "google"),
    ("macos", "provided-by", "apple"),
    ("html", "maintained-by", "w3c"),
    ("symfony", "maintained-by", "sensiolabs-sas"),
    ("uportal", "maintained-by", "apereo"),
    ("backbonejs", "has-license", "mit-license"),
    ("ansible", "has-license", "gnu-gpl-license"),
    ("robotframework", "has-license", "apache-license"),
]

ALIASES: dict[str, set[str]] = {
    "kubernetes": {"k8s"},
    "machine-learning": {"ml"},
    "ai": {"artificial-intelligence"},
    "nlp": {"natural-language-processing"},
    "aws": {"amazon-web-services"},
    "cicd": {"ci-cd"},
}

# invented, stable project counts for the starter topics (n_t); anything
# missing here defaults to 0 and is refreshable via `popularity fetch`
POPULARITY: dict[str, int] = {
    "python": 152000,
    "machine-learning": 61000,
    "ai": 45200,
    "docker": 28400,
    "linux": 30100,
    "html": 31500,
    "django": 13900,
    "kubernetes": 22300,
    "android": 41800,
    "framework": 18100,
    "backend": 9100,
    "web-development": 15600,
    "graphics": 6200,
    "azure": 8900,
    "cloud-computing": 7400,
    "auth0": 1100,
    "authentication": 7800,
    "blockchain": 19400,
    "decentralization": 900,
    "cryptography": 6800,
    "image-processing": 5200,
    "continuous-deployment": 1700,
    "cicd": 4300,
    "user-experience": 2600,
    "ui-ux": 3900,
    "deep-learning": 26800,
    "neural-network": 10900,
    "archlinux": 2100,
    "lua": 5900,
    "xmake": 160,
    "reactiveui": 240,
    "mvvm": 2900,
    "agile": 1900,
    "speed": 450,
    "end-to-end-encryption": 620,
    "privacy": 3300,
    "neo4j": 1800,
    "scalability": 980,
    "flexibility": 210,
    "mysql": 17800,
    "open-source": 12500,
    "anki": 740,
    "cross-platform": 6100,
    "elite-dangerous": 90,
    "multiplayer": 2300,
    "robotics": 4700,
    "data-science": 21700,
    "nlp": 13200,
    "google": 9600,
    "flutter": 24800,
    "amazon": 3800,
    "aws": 16900,
    "mediawiki": 560,
    "wikipedia": 1500,
    "atom": 2500,
    "github": 14700,
    "macos": 8200,
    "apple": 3100,
    "w3c": 380,
    "symfony": 4400,
    "sensiolabs-sas": 30,
    "uportal": 25,
    "apereo": 40,
    "backbonejs": 410,
    "mit-license": 5400,
    "ansible": 7700,
    "gnu-gpl-license": 1300,
    "robotframework": 870,
    "apache-license": 2400,
    "3d": 7100,
    "operating-system": 4100,
    "text-editor": 2800,
    "mit": 0,
}

STARTER_VOTERS = ("seed-rater-1", "seed-rater-2", "seed-rater-3")


def seed_topic_names() -> list[str]:
    names: dict[str, None] = {}
    for subject, _, obj in TRIPLES:
        names.setdefault(subject)
        names.setdefault(obj)
    return list(names)


def build_seed_engine(policy: AcceptancePolicy | None = None) -> CurationEngine:
    """Starter graph with every relationship accepted by three unanimous votes."""
    engine = CurationEngine(policy=policy)
    engine.graph.snapshot_label = "starter"
    verb_ids: dict[str, str] = {}
    for verb, definition, bidirectional in RELATION_TYPES:
        rt = engine.add_relation_type(verb, definition, bidirectional)
        verb_ids[verb] = rt.id
    topic_ids: dict[str, str] = {}
    for name in seed_topic_names():
        topic = engine.add_topic(
            name,
            aliases=ALIASES.get(name, set()),
            origin="maintainer",
            popularity_count=POPULARITY.get(name, 0),
        )
        topic_ids[name] = topic.id
    for voter in STARTER_VOTERS:
        engine.register_contributor(voter, background="industry", years_experience=5)
        for verb_id in verb_ids.values():
            engine.mark_verb_read(voter, verb_id)
    for subject, verb, obj in TRIPLES:
        rel = engine.add_relationship(topic_ids[subject], verb_ids[verb], topic_ids[obj])
        for voter in STARTER_VOTERS:
            engine.cast_vote(voter, rel.id, True)
    return engine


def seed_snapshot_text() -> str:
    return export_engine(build_seed_engine())


def write_seed_snapshot(path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(seed_snapshot_text())
