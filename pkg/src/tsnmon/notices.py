"""Notice catalog: the structured security alerts the detection rules emit.

Each notice code has a fixed evidence schema (checked at construction) so
downstream consumers can rely on the keys. `repeats` is allowed everywhere:
it carries the number of identical notices collapsed by deduplication.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .wire import StreamId


class NoticeCode(Enum):
    N1_EXCESSIVE_RESOURCE_REQUEST = "N1.SRP.ExcessiveResourceRequest"
    N2_DEVIATING_RESOURCE_REQUEST = "N2.SRP.DeviatingResourceRequest"
    N3_TOO_MANY_REQUESTS = "N3.SRP.TooManyRequests"
    N4_CHANGING_EXISTING_ALLOCATION = "N4.SRP.ChangingExistingAllocation"
    N5_DANGLING_RESOURCES = "N5.SRP.DanglingResources"
    N6_OUT_OF_ORDER_FRAMES = "N6.FRER.OutOfOrderFrames"
    N7_EXCESSIVE_MEMBER_STREAMS = "N7.FRER.ExcessiveMemberStreams"
    N8_TERMINATED_MEMBER_STREAMS = "N8.FRER.TerminatedMemberStreams"

    @property
    def short(self) -> str:
        return self.value.split(".", 1)[0]


class Rule(Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    A4 = "A4"
    A5 = "A5"
    A6 = "A6"
    A7 = "A7"


# Notice codes each rule may emit.
RULE_NOTICES = {
    Rule.A1: {NoticeCode.N1_EXCESSIVE_RESOURCE_REQUEST, NoticeCode.N2_DEVIATING_RESOURCE_REQUEST},
    Rule.A2: {
        NoticeCode.N1_EXCESSIVE_RESOURCE_REQUEST,
        NoticeCode.N2_DEVIATING_RESOURCE_REQUEST,
        NoticeCode.N3_TOO_MANY_REQUESTS,
    },
    Rule.A3: {
        NoticeCode.N1_EXCESSIVE_RESOURCE_REQUEST,
        NoticeCode.N2_DEVIATING_RESOURCE_REQUEST,
        NoticeCode.N4_CHANGING_EXISTING_ALLOCATION,
    },
    Rule.A4: {NoticeCode.N5_DANGLING_RESOURCES},
    Rule.A5: {NoticeCode.N6_OUT_OF_ORDER_FRAMES, NoticeCode.N7_EXCESSIVE_MEMBER_STREAMS},
    Rule.A6: {NoticeCode.N7_EXCESSIVE_MEMBER_STREAMS},
    Rule.A7: {NoticeCode.N7_EXCESSIVE_MEMBER_STREAMS, NoticeCode.N8_TERMINATED_MEMBER_STREAMS},
}

# Allowed evidence keys per code; "repeats" is implicitly allowed for all.
EVIDENCE_KEYS = {
    NoticeCode.N1_EXCESSIVE_RESOURCE_REQUEST: {"metric", "observed", "limit"},
    NoticeCode.N2_DEVIATING_RESOURCE_REQUEST: {"metric", "observed", "mean", "ratio"},
    NoticeCode.N3_TOO_MANY_REQUESTS: {"count", "limit", "window_s"},
    NoticeCode.N4_CHANGING_EXISTING_ALLOCATION: {"observed", "expected", "metric"},
    NoticeCode.N5_DANGLING_RESOURCES: {"idle_s", "registered_at", "last_data_at"},
    NoticeCode.N6_OUT_OF_ORDER_FRAMES: {"observed", "expected", "decision"},
    NoticeCode.N7_EXCESSIVE_MEMBER_STREAMS: {
        "seq", "count", "redundancy",          # duplicate copies beyond redundancy
        "link", "shared_nodes",                # member-path intersection
        "observed", "expected", "reason",      # sequence re-base after timeout
    },
    NoticeCode.N8_TERMINATED_MEMBER_STREAMS: {"idle_s", "timeout_s", "last_frame_at"},
}


@dataclass(frozen=True)
class Notice:
    code: NoticeCode
    ts: float
    rule: Rule
    msg: str
    stream_id: Optional[StreamId] = None
    evidence: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.code not in RULE_NOTICES[self.rule]:
            raise ValueError(f"rule {self.rule.value} cannot emit {self.code.value}")
        allowed = EVIDENCE_KEYS[self.code] | {"repeats"}
        extra = set(self.evidence) - allowed
        if extra:
            raise ValueError(f"evidence keys {sorted(extra)} not in {self.code.value} schema")
