"""In-process publish/subscribe bus decoupling frame monitoring from detection.

Four topics: FRER data frames, SRP talker advertises, SRP listener responses,
and notices flowing back toward the log. Delivery is per-topic FIFO with a
bounded queue per subscription; a full queue blocks the publisher rather than
dropping events. Late subscribers do not see earlier events.
"""

import queue
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Iterator

from .errors import BusClosed
from .wire import RTagFrame, SrpListenerResponse, SrpTalkerAdvertise


class Topic(Enum):
    FRER = "frer"
    SRP_TALKER = "srp_talker"
    SRP_LISTENER = "srp_listener"
    NOTICE = "notice"


# Expected payload type per topic; NOTICE is checked structurally to avoid
# an import cycle with the notice definitions.
_PAYLOAD_TYPES = {
    Topic.FRER: RTagFrame,
    Topic.SRP_TALKER: SrpTalkerAdvertise,
    Topic.SRP_LISTENER: SrpListenerResponse,
}

_CLOSE = object()


@dataclass(frozen=True)
class BusEvent:
    topic: Topic
    timestamp: float
    payload: Any

    def __post_init__(self):
        expected = _PAYLOAD_TYPES.get(self.topic)
        if expected is not None and not isinstance(self.payload, expected):
            raise ValueError(
                f"topic {self.topic.value} carries {expected.__name__}, "
                f"got {type(self.payload).__name__}"
            )
        if self.topic is Topic.NOTICE and not hasattr(self.payload, "code"):
            raise ValueError("notice topic payload must be a notice")


@dataclass
class Subscription:
    """Handle yielding the events published to its topics, in publish order.

    A handle subscribed to several topics observes the global publish order
    across them, since every publish lands in the same queue.
    """

    topics: frozenset
    _queue: queue.Queue = field(repr=False)

    def get(self, timeout: float | None = None) -> BusEvent | None:
        """Next event, or None once the bus has closed and the queue drained.

        Raises queue.Empty when a timeout is given and nothing arrives.
        """
        item = self._queue.get(timeout=timeout)
        if item is _CLOSE:
            # Leave the sentinel for any other waiter on this handle.
            self._queue.put(_CLOSE)
            return None
        return item

    def drain(self) -> Iterator[BusEvent]:
        """Yield whatever is queued right now without blocking."""
        while True:
            try:
                item = self._queue.get_nowait()
            except queue.Empty:
                return
            if item is _CLOSE:
                self._queue.put(_CLOSE)
                return
            yield item

    def __iter__(self) -> Iterator[BusEvent]:
        while True:
            event = self.get()
            if event is None:
                return
            yield event


class EventBus:
    """Bounded in-process bus; safe for concurrent publishers and subscribers."""

    def __init__(self, maxsize: int = 1024):
        self._maxsize = maxsize
        self._lock = threading.Lock()
        self._subs: dict[Topic, list[Subscription]] = {topic: [] for topic in Topic}
        self._closed = False

    def subscribe(self, *topics: Topic | Iterable[Topic]) -> Subscription:
        flat: list[Topic] = []
        for t in topics:
            if isinstance(t, Topic):
                flat.append(t)
            else:
                flat.extend(t)
        if not flat:
            raise ValueError("subscribe needs at least one topic")
        sub = Subscription(frozenset(flat), queue.Queue(maxsize=self._maxsize))
        with self._lock:
            if self._closed:
                raise BusClosed("bus is closed")
            for topic in sub.topics:
                self._subs[topic].append(sub)
        return sub

    def publish(self, event: BusEvent) -> None:
        """Deliver the event to every current subscriber of its topic.

        Blocks while any subscriber queue is full; never drops events.
        Publishes are serialized, so all subscribers observe one order.
        """
        with self._lock:
            if self._closed:
                raise BusClosed("bus is closed")
            for sub in self._subs[event.topic]:
                sub._queue.put(event)

    def close(self) -> None:
        """Stop accepting publishes; subscribers drain then see end-of-stream."""
        with self._lock:
            if self._closed:
                return
            self._closed = True
            subs = {id(s): s for topic_subs in self._subs.values() for s in topic_subs}
        for sub in subs.values():
            sub._queue.put(_CLOSE)

    @property
    def closed(self) -> bool:
        return self._closed
