"""Append-only NDJSON record store.

Records land in numbered segment files, one JSON object per line, flushed
before the append returns. Acknowledged records are immutable: nothing here
rewrites or deletes. Reopening a directory resumes the sequence counter from
whatever is on disk.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator

RECORD_KINDS = ("kpi", "decision", "message", "violation", "lifecycle")

SEGMENT_PREFIX = "segment-"
SEGMENT_SUFFIX = ".ndjson"


@dataclass(frozen=True)
class LogRecord:
    seq: int
    timestamp_s: float
    kind: str
    payload: dict
    agent_id: str | None = None

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "timestamp_s": self.timestamp_s,
            "kind": self.kind,
            "agent_id": self.agent_id,
            "payload": self.payload,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogRecord":
        return cls(
            seq=int(d["seq"]),
            timestamp_s=float(d["timestamp_s"]),
            kind=d["kind"],
            payload=d["payload"],
            agent_id=d.get("agent_id"),
        )


class DataLake:
    def __init__(self, root: str | Path, segment_records: int = 10_000, fsync: bool = False):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._segment_records = segment_records
        self._fsync = fsync
        self._lock = threading.Lock()
        self._observers: list[Callable[[LogRecord], None]] = []
        self._fh = None
        self._fh_lines = 0
        self._recover()

    # -- write path ----------------------------------------------------------

    def _segments(self) -> list[Path]:
        return sorted(self.root.glob(f"{SEGMENT_PREFIX}*{SEGMENT_SUFFIX}"))

    def _recover(self) -> None:
        self._next_seq = 1
        segments = self._segments()
        if not segments:
            self._open_segment(1)
            return
        last = segments[-1]
        lines = 0
        for rec in self._iter_file(last):
            self._next_seq = rec.seq + 1
            lines = lines + 1
        for seg in segments[:-1]:
            for rec in self._iter_file(seg):
                self._next_seq = max(self._next_seq, rec.seq + 1)
        index = int(last.name[len(SEGMENT_PREFIX):-len(SEGMENT_SUFFIX)])
        if lines >= self._segment_records:
            self._open_segment(index + 1)
        else:
            self._fh = open(last, "a", encoding="utf-8")
            self._fh_lines = lines

    def _open_segment(self, index: int) -> None:
        if self._fh is not None:
            self._fh.close()
        path = self.root / f"{SEGMENT_PREFIX}{index:06d}{SEGMENT_SUFFIX}"
        self._fh = open(path, "a", encoding="utf-8")
        self._fh_lines = 0

    def add_observer(self, fn: Callable[[LogRecord], None]) -> None:
        """Called synchronously after each durable append (event fan-out)."""
        self._observers.append(fn)

    def append(self, kind: str, payload: dict, timestamp_s: float,
               agent_id: str | None = None) -> int:
        if kind not in RECORD_KINDS:
            raise ValueError(f"unknown record kind {kind!r}")
        with self._lock:
            record = LogRecord(
                seq=self._next_seq,
                timestamp_s=timestamp_s,
                kind=kind,
                payload=payload,
                agent_id=agent_id,
            )
            line = json.dumps(record.to_dict(), sort_keys=True, separators=(",", ":"))
            self._fh.write(line + "\n")
            self._fh.flush()
            if self._fsync:
                import os

                os.fsync(self._fh.fileno())
            self._next_seq += 1
            self._fh_lines += 1
            if self._fh_lines >= self._segment_records:
                current = int(
                    Path(self._fh.name).name[len(SEGMENT_PREFIX):-len(SEGMENT_SUFFIX)]
                )
                self._open_segment(current + 1)
        for fn in self._observers:
            fn(record)
        return record.seq

    def close(self) -> None:
        with self._lock:
            if self._fh is not None:
                self._fh.close()
                self._fh = None

    # -- read path -----------------------------------------------------------

    @staticmethod
    def _iter_file(path: Path) -> Iterator[LogRecord]:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    yield LogRecord.from_dict(json.loads(line))

    def iter_records(self) -> Iterator[LogRecord]:
        for seg in self._segments():
            yield from self._iter_file(seg)

    def query_range(
        self,
        kinds: Iterable[str] | None,
        t0: float,
        t1: float,
    ) -> list[LogRecord]:
        """Records with timestamp in [t0, t1] (inclusive both ends) and kind
        in kinds (None = all), in seq order."""
        if t0 > t1:
            raise ValueError(f"t0 {t0} must not exceed t1 {t1}")
        kind_set = set(kinds) if kinds is not None else None
        out = [
            rec
            for rec in self.iter_records()
            if t0 <= rec.timestamp_s <= t1
            and (kind_set is None or rec.kind in kind_set)
        ]
        out.sort(key=lambda r: r.seq)
        return out

    def query_since_seq(self, seq: int) -> list[LogRecord]:
        out = [rec for rec in self.iter_records() if rec.seq > seq]
        out.sort(key=lambda r: r.seq)
        return out


class BufferingWriter:
    """Wraps a lake so producers survive storage hiccups.

    Failed appends are buffered (up to capacity, oldest dropped beyond it)
    and retried in order before the next record is written.
    """

    def __init__(self, lake: DataLake, capacity: int = 1000):
        self._lake = lake
        self._buffer: list[tuple[str, dict, float, str | None]] = []
        self._capacity = capacity
        self._lock = threading.Lock()

    @property
    def buffered(self) -> int:
        return len(self._buffer)

    def append(self, kind: str, payload: dict, timestamp_s: float,
               agent_id: str | None = None) -> int | None:
        with self._lock:
            entry = (kind, payload, timestamp_s, agent_id)
            try:
                while self._buffer:
                    k, p, t, a = self._buffer[0]
                    self._lake.append(k, p, t, a)
                    self._buffer.pop(0)
                return self._lake.append(*entry)
            except OSError:
                self._buffer.append(entry)
                if len(self._buffer) > self._capacity:
                    self._buffer.pop(0)
                return None
