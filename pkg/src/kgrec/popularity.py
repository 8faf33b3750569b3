"""Per-topic project counts: live API client with an offline cache file.

The cache file is the stable contract; the live endpoint (GitHub's
repository search, one paced query per topic) is optional and every
failure falls back to the cached count or zero with a warning.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable

import httpx

from .errors import AllSourcesUnavailable
from .store import KnowledgeGraph

logger = logging.getLogger(__name__)

CACHE_FORMAT = "kgrec-popularity"
CACHE_VERSION = 1
SOURCE_LIVE = "live-api"
SOURCE_CACHE = "cache-file"
DEFAULT_TTL_SECONDS = 7 * 24 * 3600

FetchFn = Callable[[str], int]


def _now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class PopularityCache:
    counts: dict[str, int] = field(default_factory=dict)
    fetched_at: str = ""
    source: str = SOURCE_CACHE
    ttl_seconds: int = DEFAULT_TTL_SECONDS

    def stale(self, now: datetime | None = None) -> bool:
        if not self.fetched_at:
            return True
        now = now or datetime.now(timezone.utc)
        fetched = datetime.strptime(self.fetched_at, "%Y-%m-%dT%H:%M:%SZ").replace(
            tzinfo=timezone.utc
        )
        return (now - fetched).total_seconds() > self.ttl_seconds

    def coverage_gaps(self, graph: KnowledgeGraph) -> list[str]:
        """Accepted topics the cache carries no count for."""
        return sorted(
            t.full_name
            for t in graph.topics.values()
            if t.state == "accepted" and t.full_name not in self.counts
        )


def load_cache(path: str | Path) -> PopularityCache:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != CACHE_FORMAT:
        raise AllSourcesUnavailable(f"not a popularity cache file: {path}")
    return PopularityCache(
        counts={k: int(v) for k, v in payload.get("counts", {}).items()},
        fetched_at=payload.get("fetched_at", ""),
        source=SOURCE_CACHE,
        ttl_seconds=int(payload.get("ttl_seconds", DEFAULT_TTL_SECONDS)),
    )


def save_cache(path: str | Path, cache: PopularityCache) -> None:
    payload = {
        "format": CACHE_FORMAT,
        "version": CACHE_VERSION,
        "fetched_at": cache.fetched_at or _now_iso(),
        "source": cache.source,
        "ttl_seconds": cache.ttl_seconds,
        "counts": dict(sorted(cache.counts.items())),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def github_count_fetcher(
    token: str | None = None,
    base_url: str = "https://api.github.com",
    pace_seconds: float = 2.0,
    max_retries: int = 3,
    client: httpx.Client | None = None,
) -> FetchFn:
    """Counts public repositories labeled with a topic via the search API.

    Requests are paced and retried with exponential backoff; rate-limit
    headers trigger an extra sleep instead of an error.
    """
    own_client = client or httpx.Client(
        base_url=base_url,
        headers={"Accept": "application/vnd.github.v3+json"}
        | ({"Authorization": f"Bearer {token}"} if token else {}),
        timeout=20.0,
    )

    def fetch(topic: str) -> int:
        last_error: Exception | None = None
        for attempt in range(max_retries):
            if attempt:
                time.sleep(pace_seconds * (2 ** (attempt - 1)))
            try:
                resp = own_client.get(
                    "/search/repositories", params={"q": f"topic:{topic}", "per_page": 1}
                )
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            remaining = resp.headers.get("X-RateLimit-Remaining")
            if remaining == "0":
                reset = int(resp.headers.get("X-RateLimit-Reset", "0"))
                wait = max(reset - time.time(), pace_seconds)
                logger.warning("rate limit exhausted; sleeping %.1fs", wait)
                time.sleep(wait)
                continue
            if resp.status_code == 200:
                time.sleep(pace_seconds)
                return int(resp.json().get("total_count", 0))
            last_error = httpx.HTTPStatusError(
                f"status {resp.status_code}", request=resp.request, response=resp
            )
        raise last_error or RuntimeError("fetch failed")

    return fetch


def fetch_popularity(
    topics: Iterable[str],
    cache_path: str | Path | None = None,
    fetch_fn: FetchFn | None = None,
) -> PopularityCache:
    """One count per topic: live when possible, cached otherwise, else 0.

    Raises AllSourcesUnavailable when there is neither a usable cache file
    nor a live fetcher.
    """
    cached: PopularityCache | None = None
    if cache_path is not None and Path(cache_path).exists():
        cached = load_cache(cache_path)
    if cached is None and fetch_fn is None:
        raise AllSourcesUnavailable("no cache file and no live endpoint configured")

    counts: dict[str, int] = {}
    live_hits = 0
    for topic in topics:
        if fetch_fn is not None:
            try:
                counts[topic] = int(fetch_fn(topic))
                live_hits += 1
                continue
            except Exception as exc:
                logger.warning("live count failed for %s: %s", topic, exc)
        if cached is not None and topic in cached.counts:
            counts[topic] = cached.counts[topic]
        else:
            logger.warning("no count available for %s; defaulting to 0", topic)
            counts[topic] = 0
    return PopularityCache(
        counts=counts,
        fetched_at=_now_iso() if live_hits else (cached.fetched_at if cached else _now_iso()),
        source=SOURCE_LIVE if live_hits else SOURCE_CACHE,
        ttl_seconds=cached.ttl_seconds if cached else DEFAULT_TTL_SECONDS,
    )


def apply_counts(graph: KnowledgeGraph, cache: PopularityCache) -> int:
    """Copy cached counts onto graph topics; returns how many were set."""
    applied = 0
    for topic in graph.topics.values():
        if topic.full_name in cache.counts:
            topic.popularity_count = cache.counts[topic.full_name]
            applied += 1
    return applied


def default_cache_path() -> Path:
    return Path(__file__).parent / "data" / "popularity_cache.json"


def seed_snapshot_path() -> Path:
    return Path(__file__).parent / "data" / "seed_snapshot.ndjson"
