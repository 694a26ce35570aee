"""Stateful core: reservation ledger, per-stream sequence recovery, rolling
traffic statistics, and the timestamps the periodic rules sweep over.

The recovery logic mirrors the elimination functions of the monitored
bridges so the detector tracks the same notion of "expected sequence
number" they do. Two variants:

match   - accept only sequence numbers strictly newer (circularly) than the
          highest accepted one; equal is a duplicate, older is stale.
vector  - additionally keep a bit history of the last H sequence numbers so
          bounded reordering is accepted once, and reject numbers farther
          than FUTURE_MAX ahead or H behind as out of range.

Sequence numbers live in a 16-bit circular space; "newer" means a signed
wraparound delta in (0, 2^15).
"""

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import InvalidModel
from .wire import SrpListenerResponse, SrpTalkerAdvertise, StreamId, TalkerStatus, TrafficSpecification

SEQ_SPACE = 1 << 16
HALF_SPACE = 1 << 15

DEFAULT_HISTORY_BITS = 64
DEFAULT_FUTURE_MAX = 2048
MAX_HISTORY_BITS = 1024
MAX_DUP_COUNT = 255

ROLLING_WINDOW = 64
DEFAULT_MIN_SAMPLES = 5


def signed_seq_delta(seq: int, reference: int) -> int:
    """Circular distance seq - reference mapped into [-2^15, 2^15)."""
    return ((seq - reference + HALF_SPACE) % SEQ_SPACE) - HALF_SPACE


class RecoveryVariant(Enum):
    MATCH = "match"
    VECTOR = "vector"


class AcceptDecision(Enum):
    ACCEPT = "accept"
    DISCARD_DUPLICATE = "discard_duplicate"
    DISCARD_STALE = "discard_stale"
    ROGUE_OUT_OF_RANGE = "rogue_out_of_range"


class ReservationStatus(Enum):
    REQUESTED = "requested"
    ACCEPTED = "accepted"
    FAILED = "failed"


class UpsertResult(Enum):
    NEW = "new"
    MODIFIES_EXISTING = "modifies_existing"


@dataclass
class StreamReservation:
    stream_id: StreamId
    traffic_spec: TrafficSpecification
    redundancy_degree: int
    status: ReservationStatus
    registered_at: float
    last_data_at: Optional[float] = None
    request_count: int = 1
    # Edge-trigger bookkeeping for the dangling-resources sweep.
    dangling_notified: bool = False


@dataclass
class RecoveryState:
    """Sequence-recovery state for one stream handle.

    `history` is a bitmask over the last `history_bits` sequence numbers
    (bit i set = highest_seq - i was accepted); used by the vector variant.
    `dup_counts` tracks copies seen per in-window sequence number so the
    engine can compare duplicates against the redundancy degree.
    """

    variant: RecoveryVariant
    history_bits: int = DEFAULT_HISTORY_BITS
    future_max: int = DEFAULT_FUTURE_MAX
    initialized: bool = False
    highest_seq: int = 0
    history: int = 0
    last_frame_at: float = 0.0
    timed_out: bool = False
    rebased: bool = False
    dup_counts: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= self.history_bits <= MAX_HISTORY_BITS:
            raise InvalidModel(f"history_bits must be in 1..{MAX_HISTORY_BITS}")
        if self.future_max < 1:
            raise InvalidModel("future_max must be >= 1")

    def seen_count(self, seq: int) -> int:
        return self.dup_counts.get(seq, 0)


@dataclass(frozen=True)
class TimeoutEvent:
    last_frame_at: float
    idle_s: float


@dataclass(frozen=True)
class DeviationReport:
    """Ratios of the newest sample to the pre-update rolling means.

    `sufficient` is False until enough samples exist; ratios are then 1.0
    placeholders and must not be treated as deviations.
    """

    bandwidth_ratio: float
    frame_rate_ratio: float
    sufficient: bool


def _rebase(state: RecoveryState, seq: int) -> None:
    state.highest_seq = seq
    state.history = 1
    state.dup_counts = {seq: 1}


def _advance(state: RecoveryState, seq: int, delta: int) -> None:
    state.highest_seq = seq
    if delta >= state.history_bits:
        state.history = 1
    else:
        mask = (1 << state.history_bits) - 1
        state.history = ((state.history << delta) | 1) & mask
    # Drop duplicate counters that fell out of the history window.
    window = state.history_bits
    state.dup_counts = {
        s: c for s, c in state.dup_counts.items()
        if -window < signed_seq_delta(s, seq) <= 0
    }
    state.dup_counts[seq] = state.dup_counts.get(seq, 0) + 1


def _count_copy(state: RecoveryState, seq: int) -> None:
    count = state.dup_counts.get(seq, 0)
    if count < MAX_DUP_COUNT:
        state.dup_counts[seq] = count + 1


def recovery_accept(state: RecoveryState, seq: int, now: float) -> AcceptDecision:
    """Run one frame through the recovery function and update the state.

    The first frame initializes the state and is accepted. After a recovery
    timeout the expected sequence number is revoked: the next frame re-bases
    the state (state.rebased is set for the caller to consume).
    """
    if not 0 <= seq < SEQ_SPACE:
        raise InvalidModel(f"sequence number {seq} outside 16-bit space")
    state.last_frame_at = now
    if not state.initialized:
        state.initialized = True
        _rebase(state, seq)
        return AcceptDecision.ACCEPT
    if state.timed_out:
        state.timed_out = False
        state.rebased = True
        _rebase(state, seq)
        return AcceptDecision.ACCEPT

    delta = signed_seq_delta(seq, state.highest_seq)
    if state.variant is RecoveryVariant.MATCH:
        if delta > 0:
            _advance(state, seq, delta)
            return AcceptDecision.ACCEPT
        if delta == 0:
            _count_copy(state, seq)
            return AcceptDecision.DISCARD_DUPLICATE
        return AcceptDecision.DISCARD_STALE

    # Vector variant.
    if 0 < delta <= state.future_max:
        _advance(state, seq, delta)
        return AcceptDecision.ACCEPT
    if -state.history_bits < delta <= 0:
        bit = 1 << (-delta)
        if state.history & bit:
            _count_copy(state, seq)
            return AcceptDecision.DISCARD_DUPLICATE
        state.history |= bit
        state.dup_counts[seq] = 1
        return AcceptDecision.ACCEPT
    return AcceptDecision.ROGUE_OUT_OF_RANGE


def check_recovery_timeout(state: RecoveryState, now: float, timeout_s: float) -> Optional[TimeoutEvent]:
    """Edge-triggered quiet-period check: one event per silence.

    Sets state.timed_out so the next frame re-bases the sequence space.
    """
    if timeout_s <= 0:
        raise InvalidModel("timeout_s must be > 0")
    if not state.initialized or state.timed_out:
        return None
    idle = now - state.last_frame_at
    if idle > timeout_s:
        state.timed_out = True
        return TimeoutEvent(last_frame_at=state.last_frame_at, idle_s=idle)
    return None


class RollingStats:
    """Rolling window over requested bandwidth and frame rate.

    The means are maintained incrementally (add new, subtract evicted) and
    stay within float rounding of a recompute over the window contents.
    """

    def __init__(self, window_size: int = ROLLING_WINDOW, min_samples: int = DEFAULT_MIN_SAMPLES):
        if window_size < 1 or min_samples < 1:
            raise InvalidModel("window_size and min_samples must be >= 1")
        self.window_size = window_size
        self.min_samples = min_samples
        self.bandwidth: deque = deque()
        self.frame_rate: deque = deque()
        self.count = 0
        self._bw_sum = 0.0
        self._fr_sum = 0.0

    @property
    def bandwidth_mean(self) -> float:
        return self._bw_sum / len(self.bandwidth) if self.bandwidth else 0.0

    @property
    def frame_rate_mean(self) -> float:
        return self._fr_sum / len(self.frame_rate) if self.frame_rate else 0.0


def update_rolling(stats: RollingStats, bandwidth_bps: float, frame_rate: float) -> DeviationReport:
    """Advance the window and report the new sample's ratio to the old mean.

    Cold start: while fewer than min_samples values were seen before this
    one, the report is flagged insufficient and carries neutral ratios.
    """
    if not (bandwidth_bps > 0 and frame_rate > 0):
        raise InvalidModel("rolling samples must be positive and finite")
    sufficient = stats.count >= stats.min_samples
    if sufficient:
        report = DeviationReport(
            bandwidth_ratio=bandwidth_bps / stats.bandwidth_mean,
            frame_rate_ratio=frame_rate / stats.frame_rate_mean,
            sufficient=True,
        )
    else:
        report = DeviationReport(1.0, 1.0, False)

    stats.bandwidth.append(bandwidth_bps)
    stats.frame_rate.append(frame_rate)
    stats._bw_sum += bandwidth_bps
    stats._fr_sum += frame_rate
    if len(stats.bandwidth) > stats.window_size:
        stats._bw_sum -= stats.bandwidth.popleft()
        stats._fr_sum -= stats.frame_rate.popleft()
    stats.count += 1
    return report


class ReservationLedger:
    """Per-stream reservation ledger keyed by stream id.

    Single-writer: all mutations happen on the detection worker. Snapshots
    are plain dicts safe to serialize for debugging and golden files.
    """

    def __init__(self):
        self.entries: dict[StreamId, StreamReservation] = {}
        self.orphan_responses = 0
        self.unreserved_frames = 0

    def upsert_reservation(self, adv: SrpTalkerAdvertise, now: float) -> UpsertResult:
        """Register a talker advertise.

        A re-advertise while still Requested is a retry (the entry tracks the
        latest spec); one for an Accepted stream is a modification attempt and
        leaves the accepted entry untouched. A Failed entry is replaced by a
        fresh request.
        """
        entry = self.entries.get(adv.stream_id)
        if entry is None:
            self.entries[adv.stream_id] = StreamReservation(
                stream_id=adv.stream_id,
                traffic_spec=adv.traffic_spec,
                redundancy_degree=adv.requirements.num_seamless_trees,
                status=ReservationStatus.REQUESTED,
                registered_at=now,
            )
            return UpsertResult.NEW
        if entry.status is ReservationStatus.ACCEPTED:
            entry.request_count += 1
            return UpsertResult.MODIFIES_EXISTING
        if entry.status is ReservationStatus.REQUESTED:
            entry.traffic_spec = adv.traffic_spec
            entry.redundancy_degree = adv.requirements.num_seamless_trees
            entry.request_count += 1
            return UpsertResult.NEW
        # Failed: start over with a fresh entry.
        self.entries[adv.stream_id] = StreamReservation(
            stream_id=adv.stream_id,
            traffic_spec=adv.traffic_spec,
            redundancy_degree=adv.requirements.num_seamless_trees,
            status=ReservationStatus.REQUESTED,
            registered_at=now,
        )
        return UpsertResult.NEW

    def apply_listener_response(self, resp: SrpListenerResponse) -> Optional[ReservationStatus]:
        """Apply a listener response; returns the new status when it changed.

        Responses for unknown streams are counted as orphans; responses for
        entries no longer Requested are ignored (status never moves back).
        """
        entry = self.entries.get(resp.stream_id)
        if entry is None:
            self.orphan_responses += 1
            return None
        if entry.status is not ReservationStatus.REQUESTED:
            return None
        if resp.talker_status is TalkerStatus.READY:
            entry.status = ReservationStatus.ACCEPTED
            return ReservationStatus.ACCEPTED
        if resp.talker_status is TalkerStatus.FAILED:
            entry.status = ReservationStatus.FAILED
            return ReservationStatus.FAILED
        return None

    def record_data_frame(self, stream_id: StreamId, now: float) -> None:
        entry = self.entries.get(stream_id)
        if entry is None:
            self.unreserved_frames += 1
            return
        entry.last_data_at = now
        entry.dangling_notified = False

    def snapshot(self) -> dict:
        """Deterministic JSON-serializable view of the ledger."""
        return {
            "orphan_responses": self.orphan_responses,
            "unreserved_frames": self.unreserved_frames,
            "streams": [
                {
                    "stream_id": sid.hex(),
                    "status": entry.status.value,
                    "redundancy_degree": entry.redundancy_degree,
                    "registered_at": entry.registered_at,
                    "last_data_at": entry.last_data_at,
                    "request_count": entry.request_count,
                    "bandwidth_bps": entry.traffic_spec.bandwidth_bps,
                    "frame_rate": entry.traffic_spec.frame_rate,
                }
                for sid, entry in sorted(self.entries.items())
            ],
        }
