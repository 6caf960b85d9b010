"""Append-only JSON-lines log for qualitative annotation records.

An entry is complete only when its line is newline-terminated, parses as
JSON, and carries the next sequence number.  Loading recovers every complete
entry; a damaged final line is reported as a corrupt tail (and truncated away
before new appends, WAL-style), while damage in the middle of the log is a
hard error naming the offending sequence number.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from ..evaluation import QualitativeRecord


class CorruptLogError(Exception):
    def __init__(self, message: str, seq: int | None = None, offset: int | None = None):
        super().__init__(message)
        self.seq = seq
        self.offset = offset


@dataclass(frozen=True)
class RecordLogEntry:
    seq: int
    ts: str
    record: QualitativeRecord

    def to_line(self) -> str:
        return json.dumps(
            {"seq": self.seq, "ts": self.ts, "record": self.record.to_dict()},
            ensure_ascii=False,
            sort_keys=True,
        ) + "\n"


@dataclass(frozen=True)
class CorruptTail:
    byte_offset: int
    after_seq: int
    reason: str


def read_log(path: str | Path) -> tuple[list[RecordLogEntry], CorruptTail | None]:
    """All complete entries plus the corrupt tail, if any."""
    path = Path(path)
    if not path.exists():
        return [], None
    data = path.read_bytes()
    entries: list[RecordLogEntry] = []
    offset = 0
    expected_seq = 1
    while offset < len(data):
        newline = data.find(b"\n", offset)
        if newline < 0:
            return entries, CorruptTail(offset, expected_seq - 1, "unterminated final line")
        line = data[offset:newline]
        problem = None
        entry = None
        try:
            obj = json.loads(line.decode("utf-8"))
            if not isinstance(obj, dict):
                problem = "entry is not an object"
            elif obj.get("seq") != expected_seq:
                problem = f"expected seq {expected_seq}, found {obj.get('seq')!r}"
            else:
                entry = RecordLogEntry(
                    seq=int(obj["seq"]),
                    ts=str(obj.get("ts", "")),
                    record=QualitativeRecord.from_dict(obj["record"]),
                )
        except (ValueError, KeyError, TypeError) as exc:
            problem = f"unreadable entry: {exc}"
        if problem is not None:
            if newline == len(data) - 1:
                return entries, CorruptTail(offset, expected_seq - 1, problem)
            raise CorruptLogError(
                f"corrupt entry at byte {offset} (seq {expected_seq}): {problem}",
                seq=expected_seq,
                offset=offset,
            )
        assert entry is not None
        entries.append(entry)
        expected_seq += 1
        offset = newline + 1
    return entries, None


class RecordLog:
    """Single-writer append log; reads on immutable snapshots are lock-free."""

    def __init__(self, path: str | Path, *, clock=None):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._clock = clock or (lambda: time.strftime("%Y-%m-%dT%H:%M:%S%z"))
        entries, tail = read_log(self.path)
        if tail is not None:
            # WAL-style recovery: a crash left a partial write; complete
            # entries are intact, so drop the tail before appending again.
            with open(self.path, "r+b") as fh:
                fh.truncate(tail.byte_offset)
        self._entries = entries
        self._next_seq = entries[-1].seq + 1 if entries else 1

    def entries(self) -> list[RecordLogEntry]:
        with self._lock:
            return list(self._entries)

    def append(self, record: QualitativeRecord) -> RecordLogEntry:
        with self._lock:
            entry = RecordLogEntry(seq=self._next_seq, ts=self._clock(), record=record)
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "ab") as fh:
                fh.write(entry.to_line().encode("utf-8"))
                fh.flush()
                import os

                os.fsync(fh.fileno())
            self._entries.append(entry)
            self._next_seq += 1
            return entry


def latest_per_key(entries: list[RecordLogEntry]) -> list[RecordLogEntry]:
    """Last write wins per (sentence, model, annotator); ordered by key."""
    by_key: dict[tuple[str, str, str], RecordLogEntry] = {}
    for entry in entries:
        r = entry.record
        by_key[(r.sentence_id, r.model_id, r.annotator_id)] = entry
    return [by_key[k] for k in sorted(by_key)]
