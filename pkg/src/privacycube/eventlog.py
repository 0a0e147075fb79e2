"""Append-only JSONL event log with size rotation, plus replay comparison.

Every pipeline event lands here before it is published, so two runs over
the same inputs can be diffed record-by-record with replay_verify.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

KINDS = ("Flow", "Notification", "Tap", "StateChange", "GeoRefresh", "Error")

DEFAULT_ROTATE_BYTES = 16 * 1024 * 1024


class MalformedLog(ValueError):
    pass


@dataclass(frozen=True)
class EventLogRecord:
    seq: int
    kind: str
    ts: float
    payload: dict


class EventLogWriter:
    """Single-writer appender; records are flushed before the call returns."""

    def __init__(self, directory: str | Path, rotate_bytes: int = DEFAULT_ROTATE_BYTES):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.rotate_bytes = rotate_bytes
        self._seq = 0
        self._file_index = 0
        self._handle = None
        self._open_next()

    def _open_next(self):
        if self._handle is not None:
            self._handle.close()
        self._file_index += 1
        path = self.directory / f"events-{self._file_index:05d}.jsonl"
        self._handle = path.open("a", encoding="utf-8")

    def append(self, kind: str, payload: dict, ts: float) -> int:
        if kind not in KINDS:
            raise ValueError(f"unknown record kind {kind!r}")
        self._seq += 1
        record = {"seq": self._seq, "kind": kind, "ts": ts, "payload": payload}
        line = json.dumps(record, sort_keys=True, separators=(",", ":"))
        self._handle.write(line + "\n")
        self._handle.flush()
        if self._handle.tell() >= self.rotate_bytes:
            self._open_next()
        return self._seq

    def close(self):
        if self._handle is not None:
            self._handle.close()
            self._handle = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _log_files(path: Path) -> list[Path]:
    if path.is_dir():
        return sorted(path.glob("events-*.jsonl"))
    return [path]


def read_log(path: str | Path) -> Iterator[EventLogRecord]:
    """Iterate records from a log file or a run directory of rotated files."""
    path = Path(path)
    if not path.exists():
        raise MalformedLog(f"{path}: does not exist")
    for file in _log_files(path):
        with file.open(encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                    yield EventLogRecord(seq=int(obj["seq"]), kind=str(obj["kind"]),
                                         ts=float(obj["ts"]), payload=obj["payload"])
                except (ValueError, KeyError, TypeError) as exc:
                    raise MalformedLog(f"{file}:{line_no}: {exc}")


@dataclass(frozen=True)
class VerifyResult:
    equal: bool
    seq: int | None = None
    reason: str | None = None


def replay_verify(log_a: str | Path, log_b: str | Path) -> VerifyResult:
    """Compare two logs record-by-record, ignoring wall-clock `ts` fields."""
    for rec_a, rec_b in itertools.zip_longest(read_log(log_a), read_log(log_b)):
        if rec_a is None or rec_b is None:
            shorter = "first" if rec_a is None else "second"
            tail = rec_b if rec_a is None else rec_a
            return VerifyResult(False, tail.seq, f"{shorter} log ends early")
        if rec_a.seq != rec_b.seq:
            return VerifyResult(False, rec_a.seq,
                                f"seq mismatch: {rec_a.seq} vs {rec_b.seq}")
        if rec_a.kind != rec_b.kind:
            return VerifyResult(False, rec_a.seq,
                                f"kind mismatch: {rec_a.kind} vs {rec_b.kind}")
        if rec_a.payload != rec_b.payload:
            return VerifyResult(False, rec_a.seq, "payload mismatch")
    return VerifyResult(True)
