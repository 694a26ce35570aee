"""Member-path intersection analysis for configured redundant routes.

Redundant member streams lose their fault independence when their paths
share a link: duplicate elimination at the shared forwarding element
collapses the redundancy. Sharing only a node is weaker (the link-level
elimination does not trigger) and is surfaced as a warning, not an alert.
"""

import json
import logging
from dataclasses import dataclass

from .errors import MalformedRoute
from .notices import Notice, NoticeCode, Rule
from .wire import StreamId

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StreamRoutes:
    stream_id: StreamId
    paths: tuple


@dataclass(frozen=True)
class RouteConfig:
    streams: tuple

    @classmethod
    def from_dict(cls, body: dict) -> "RouteConfig":
        try:
            raw_streams = body["streams"]
        except (KeyError, TypeError):
            raise MalformedRoute("route config needs a 'streams' list") from None
        streams = []
        for raw in raw_streams:
            try:
                sid = StreamId.from_hex(raw["stream_id"])
                paths = tuple(tuple(str(node) for node in path) for path in raw["paths"])
            except (KeyError, TypeError, ValueError) as exc:
                raise MalformedRoute(f"bad stream route entry: {exc}") from None
            streams.append(StreamRoutes(sid, paths))
        return cls(tuple(streams))


def load_routes(path) -> RouteConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            body = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedRoute(f"route file is not valid JSON: {exc}") from None
    return RouteConfig.from_dict(body)


def _path_links(path) -> set:
    return {frozenset(pair) for pair in zip(path, path[1:])}


def _validate_path(path) -> None:
    if len(path) < 2:
        raise MalformedRoute(f"path {list(path)} has fewer than 2 nodes")
    for a, b in zip(path, path[1:]):
        if a == b:
            raise MalformedRoute(f"path {list(path)} repeats node {a!r} consecutively")


def check_routes(route_config: RouteConfig, now: float = 0.0) -> list[Notice]:
    """One alert per link shared by two member paths of the same stream.

    Links incident to the talker or listener endpoints are excluded: every
    member path necessarily touches those nodes. Interior nodes shared
    without a shared link are logged as warnings and attached as evidence
    to any link alerts for the stream.
    """
    notices = []
    for stream in route_config.streams:
        for path in stream.paths:
            _validate_path(path)
        endpoints = set()
        for path in stream.paths:
            endpoints.add(path[0])
            endpoints.add(path[-1])
        shared_links = set()
        shared_nodes = set()
        paths = stream.paths
        for i in range(len(paths)):
            for j in range(i + 1, len(paths)):
                links = _path_links(paths[i]) & _path_links(paths[j])
                shared_links |= {l for l in links if not (l & endpoints)}
                nodes = (set(paths[i]) & set(paths[j])) - endpoints
                shared_nodes |= nodes
        if shared_nodes:
            logger.warning(
                "stream %s member paths share nodes %s",
                stream.stream_id.hex(), sorted(shared_nodes),
            )
        for link in sorted(tuple(sorted(l)) for l in shared_links):
            notices.append(Notice(
                code=NoticeCode.N7_EXCESSIVE_MEMBER_STREAMS,
                ts=now,
                rule=Rule.A6,
                msg=f"member paths of stream {stream.stream_id.hex()} share link {link[0]}-{link[1]}",
                stream_id=stream.stream_id,
                evidence={
                    "link": f"{link[0]}-{link[1]}",
                    "shared_nodes": ",".join(sorted(shared_nodes)),
                },
            ))
    return notices
