"""Newline-delimited JSON notice log: one alert per line, flushed per line.

Record fields: ts, note (code string), msg, stream_id (16 hex chars or
null), evidence (flat string map), rule. Lines round-trip losslessly.
"""

import json
from dataclasses import dataclass, field
from typing import IO, Optional

from .notices import Notice, NoticeCode
from .wire import StreamId

_FIELDS = ("ts", "note", "msg", "stream_id", "evidence", "rule")


@dataclass(frozen=True)
class NoticeRecord:
    ts: float
    note: str
    msg: str
    stream_id: Optional[str] = None
    evidence: dict = field(default_factory=dict)
    rule: str = "A1"

    def to_json(self) -> str:
        body = {
            "ts": self.ts,
            "note": self.note,
            "msg": self.msg,
            "stream_id": self.stream_id,
            "evidence": self.evidence,
            "rule": self.rule,
        }
        return json.dumps(body, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "NoticeRecord":
        body = json.loads(line)
        unknown = set(body) - set(_FIELDS)
        if unknown:
            raise ValueError(f"unknown notice record fields {sorted(unknown)}")
        return cls(
            ts=float(body["ts"]),
            note=str(body["note"]),
            msg=str(body["msg"]),
            stream_id=body.get("stream_id"),
            evidence={str(k): str(v) for k, v in body.get("evidence", {}).items()},
            rule=str(body["rule"]),
        )

    @classmethod
    def from_notice(cls, notice: Notice) -> "NoticeRecord":
        return cls(
            ts=notice.ts,
            note=notice.code.value,
            msg=notice.msg,
            stream_id=notice.stream_id.hex() if notice.stream_id is not None else None,
            evidence={k: str(v) for k, v in notice.evidence.items()},
            rule=notice.rule.value,
        )

    @property
    def code(self) -> NoticeCode:
        return NoticeCode(self.note)

    def parsed_stream_id(self) -> Optional[StreamId]:
        return StreamId.from_hex(self.stream_id) if self.stream_id else None


def emit_notice(log: IO[str], notice: Notice) -> None:
    """Append one JSON line for the notice and flush so the log is tail-able."""
    log.write(NoticeRecord.from_notice(notice).to_json() + "\n")
    log.flush()


def read_notice_log(path) -> list[NoticeRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(NoticeRecord.from_json(line))
    return records


class NoticeLog:
    """Sole writer to a notice log file."""

    def __init__(self, path):
        self.path = path
        self._fh = open(path, "w", encoding="utf-8")
        self.count = 0
        self.by_code: dict[str, int] = {}

    def emit(self, notice: Notice) -> None:
        emit_notice(self._fh, notice)
        self.count += 1
        short = notice.code.short
        self.by_code[short] = self.by_code.get(short, 0) + 1

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
