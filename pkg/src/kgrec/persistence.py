"""Durable curation store: base snapshot plus append-only operation log.

Every mutation is applied in memory first, then appended to the log and
fsynced before the caller sees a result, so an acknowledged mutation
survives a crash at any point. Recovery loads the base snapshot and
replays the log; a torn final record (partial write from a crash) is
discarded, which can only ever drop an unacknowledged mutation.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path
from typing import Any

from .curation import AcceptancePolicy, CurationEngine
from .errors import CorruptSnapshot
from .snapshot import decode_snapshot, export_engine

BASE_FILE = "base.ndjson"
LOG_FILE = "audit.ndjson"

# operations that may appear in the log, dispatched to engine methods
_OPS = (
    "add_topic",
    "add_relation_type",
    "add_relationship",
    "register_contributor",
    "mark_verb_read",
    "cast_vote",
    "recompute_reliability",
    "grant_creator",
)


class DurableStore:
    """Single-writer durable wrapper around a CurationEngine.

    All mutations are serialized through one lock; readers that need a
    consistent view take the same lock briefly.
    """

    def __init__(self, directory: str | Path, engine: CurationEngine, seq: int = 0):
        self.directory = Path(directory)
        self.engine = engine
        self.lock = threading.RLock()
        self._seq = seq
        self._log_path = self.directory / LOG_FILE

    # -- lifecycle ---------------------------------------------------------

    @classmethod
    def create(
        cls,
        directory: str | Path,
        snapshot_text: str | None = None,
        policy: AcceptancePolicy | None = None,
    ) -> "DurableStore":
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        base = directory / BASE_FILE
        if base.exists() or (directory / LOG_FILE).exists():
            raise CorruptSnapshot(f"store already initialized: {directory}")
        if snapshot_text is None:
            snapshot_text = '{"kind": "snapshot", "version": 1, "label": ""}\n'
        engine = decode_snapshot(snapshot_text, policy)
        base.write_text(snapshot_text, encoding="utf-8")
        (directory / LOG_FILE).touch()
        return cls(directory, engine)

    @classmethod
    def open(cls, directory: str | Path, policy: AcceptancePolicy | None = None) -> "DurableStore":
        directory = Path(directory)
        base = directory / BASE_FILE
        if not base.exists():
            raise CorruptSnapshot(f"no base snapshot in {directory}")
        try:
            engine = decode_snapshot(base.read_text(encoding="utf-8"), policy)
        except Exception as exc:
            raise CorruptSnapshot(f"base snapshot unreadable: {exc}") from exc
        records = cls._read_log(directory / LOG_FILE)
        seq = 0
        for rec in records:
            seq = rec["seq"]
            op = rec["op"]
            if op not in _OPS:
                raise CorruptSnapshot(f"unknown op in log: {op!r}")
            try:
                getattr(engine, op)(**rec["args"])
            except Exception as exc:
                raise CorruptSnapshot(f"replay failed at seq {seq} ({op}): {exc}") from exc
        return cls(directory, engine, seq=seq)

    @staticmethod
    def _read_log(path: Path) -> list[dict]:
        if not path.exists():
            return []
        raw = path.read_bytes()
        if not raw:
            return []
        lines = raw.split(b"\n")
        lines.pop()  # bytes after the last newline; non-empty means a torn write
        records: list[dict] = []
        for i, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line.decode("utf-8")))
            except (json.JSONDecodeError, UnicodeDecodeError) as exc:
                if i == len(lines) - 1:
                    break  # torn final record; it was never acknowledged
                raise CorruptSnapshot(f"log record {i + 1} unreadable: {exc}") from exc
        return records

    # -- durability ------------------------------------------------------------

    def _append_bytes(self, data: bytes) -> None:
        with open(self._log_path, "ab") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())

    @staticmethod
    def _jsonable(value):
        if isinstance(value, (set, frozenset)):
            return sorted(value)
        raise TypeError(f"not loggable: {type(value).__name__}")

    def _commit(self, op: str, args: dict[str, Any]) -> None:
        self._seq += 1
        record = {"seq": self._seq, "op": op, "args": args}
        line = json.dumps(record, ensure_ascii=False, default=self._jsonable) + "\n"
        self._append_bytes(line.encode("utf-8"))

    def _mutate(self, op: str, **args):
        with self.lock:
            result = getattr(self.engine, op)(**args)
            self._commit(op, args)
            return result

    # -- mutations (ack only after the log write) -------------------------------

    def add_topic(self, full_name: str, **kwargs):
        return self._mutate("add_topic", full_name=full_name, **kwargs)

    def add_relation_type(self, verb: str, **kwargs):
        return self._mutate("add_relation_type", verb=verb, **kwargs)

    def add_relationship(self, subject: str, verb: str, obj: str, proposer: str = "maintainer"):
        return self._mutate(
            "add_relationship", subject=subject, verb=verb, obj=obj, proposer=proposer
        )

    def register_contributor(self, contributor_id: str, background: str, years_experience: float):
        return self._mutate(
            "register_contributor",
            contributor_id=contributor_id,
            background=background,
            years_experience=years_experience,
        )

    def mark_verb_read(self, contributor_id: str, verb_id: str):
        return self._mutate("mark_verb_read", contributor_id=contributor_id, verb_id=verb_id)

    def cast_vote(self, contributor_id: str, rel_id: str, value: bool | None):
        return self._mutate("cast_vote", contributor_id=contributor_id, rel_id=rel_id, value=value)

    def recompute_reliability(self, contributor_id: str):
        return self._mutate("recompute_reliability", contributor_id=contributor_id)

    def grant_creator(self, contributor_id: str):
        return self._mutate("grant_creator", contributor_id=contributor_id)

    # -- reads --------------------------------------------------------------

    def export_snapshot(self) -> str:
        with self.lock:
            return export_engine(self.engine)

    def export_audit(self) -> str:
        with self.lock:
            return "".join(
                json.dumps(event, ensure_ascii=False) + "\n" for event in self.engine.events
            )
