"""Byte-level codec for the TSN frame formats the detector consumes.

On-wire layouts (all multi-byte fields big-endian, see docs/wire-format.md):

Ethernet frame
    | dst_mac (6) | src_mac (6) | ethertype (2) | payload (<= 1500) |

SRP payload, ethertype 0x22EA
    | msg_type (1) | body |
    msg_type 1 = talker advertise, body 31 bytes:
        stream_id (8) = mac (6) + unique_id (2)
        traffic_spec (12) = interval_numerator (4) + interval_denominator (4)
                          + max_frames_per_interval (2) + max_frame_size (2)
        requirements (5) = num_seamless_trees (1) + max_latency_us (4)
        dst_mac_of_stream (6)
    msg_type 2 = listener response, body 9 bytes:
        stream_id (8) + talker_status (1)
    Trailing bytes beyond the fixed layout are tolerated and ignored.

FRER payload, ethertype 0xF1C1
    | reserved (2) | sequence_number (2) | encapsulated_ethertype (2) |
    | unique_id (2) | encapsulated payload |
    The stream handle is (frame dst_mac, unique_id). Encoders write the
    reserved bytes as zero; the parser ignores their value.
"""

import struct
from dataclasses import dataclass, field
from enum import Enum

from .errors import BadEnum, BadMessageType, InvalidModel, TruncatedFrame

ETHERTYPE_SRP = 0x22EA
ETHERTYPE_FRER = 0xF1C1
ETHERTYPE_MIN = 0x0600
MAX_PAYLOAD = 1500
ETHERNET_HEADER_SIZE = 14

MSG_TYPE_TALKER = 1
MSG_TYPE_LISTENER = 2

# Fixed payload sizes, message-type byte included.
TALKER_LAYOUT_SIZE = 1 + 8 + 12 + 5 + 6
LISTENER_LAYOUT_SIZE = 1 + 8 + 1
RTAG_HEADER_SIZE = 8

# Default destination for SRP signaling frames (link-local control MAC).
SRP_DST_MAC = bytes.fromhex("0180c200000e")

_U16 = struct.Struct(">H")
_STREAM_ID = struct.Struct(">6sH")
_TRAFFIC_SPEC = struct.Struct(">IIHH")
_REQUIREMENTS = struct.Struct(">BI")
_RTAG = struct.Struct(">HHHH")


def _check_mac(name, value):
    if not isinstance(value, (bytes, bytearray)) or len(value) != 6:
        raise InvalidModel(f"{name} must be 6 bytes, got {value!r}")


def _check_uint(name, value, bits):
    if not isinstance(value, int) or not 0 <= value < (1 << bits):
        raise InvalidModel(f"{name} must be an unsigned {bits}-bit integer, got {value!r}")


def format_mac(mac: bytes) -> str:
    return ":".join(f"{b:02x}" for b in mac)


class FrameKind(Enum):
    SRP_TALKER = "srp_talker"
    SRP_LISTENER = "srp_listener"
    FRER = "frer"
    OTHER = "other"


class TalkerStatus(Enum):
    NONE = 0
    READY = 1
    FAILED = 2


@dataclass(frozen=True)
class EtherFrame:
    """Raw Ethernet frame: addressing plus unparsed payload."""

    dst_mac: bytes
    src_mac: bytes
    ethertype: int
    payload: bytes

    def __post_init__(self):
        _check_mac("dst_mac", self.dst_mac)
        _check_mac("src_mac", self.src_mac)
        _check_uint("ethertype", self.ethertype, 16)
        if self.ethertype < ETHERTYPE_MIN:
            raise InvalidModel(f"ethertype {self.ethertype:#06x} below {ETHERTYPE_MIN:#06x}")
        if len(self.payload) > MAX_PAYLOAD:
            raise InvalidModel(f"payload of {len(self.payload)} bytes exceeds {MAX_PAYLOAD}")

    def to_bytes(self) -> bytes:
        return self.dst_mac + self.src_mac + _U16.pack(self.ethertype) + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "EtherFrame":
        if len(data) < ETHERNET_HEADER_SIZE:
            raise TruncatedFrame(f"ethernet frame of {len(data)} bytes")
        (ethertype,) = _U16.unpack_from(data, 12)
        return cls(bytes(data[0:6]), bytes(data[6:12]), ethertype, bytes(data[14:]))


@dataclass(frozen=True)
class StreamId:
    """8-byte stream identity: destination MAC plus a 16-bit unique id."""

    mac_address: bytes
    unique_id: int

    def __post_init__(self):
        _check_mac("mac_address", self.mac_address)
        _check_uint("unique_id", self.unique_id, 16)

    def wire_bytes(self) -> bytes:
        return _STREAM_ID.pack(self.mac_address, self.unique_id)

    def __lt__(self, other):
        if not isinstance(other, StreamId):
            return NotImplemented
        return self.wire_bytes() < other.wire_bytes()

    def hex(self) -> str:
        return self.wire_bytes().hex()

    @classmethod
    def from_hex(cls, text: str) -> "StreamId":
        raw = bytes.fromhex(text)
        if len(raw) != 8:
            raise InvalidModel(f"stream id hex must decode to 8 bytes, got {len(raw)}")
        mac, unique_id = _STREAM_ID.unpack(raw)
        return cls(mac, unique_id)

    def __str__(self):
        return self.hex()


@dataclass(frozen=True)
class TrafficSpecification:
    """Requested traffic shape: frames per interval of numerator/denominator seconds."""

    interval_numerator: int
    interval_denominator: int
    max_frames_per_interval: int
    max_frame_size: int

    def __post_init__(self):
        _check_uint("interval_numerator", self.interval_numerator, 32)
        _check_uint("interval_denominator", self.interval_denominator, 32)
        _check_uint("max_frames_per_interval", self.max_frames_per_interval, 16)
        _check_uint("max_frame_size", self.max_frame_size, 16)
        if self.interval_denominator == 0:
            raise InvalidModel("interval_denominator must be > 0")
        if self.interval_numerator == 0:
            raise InvalidModel("interval_numerator must be > 0")
        if self.max_frames_per_interval == 0:
            raise InvalidModel("max_frames_per_interval must be > 0")
        if self.max_frame_size < 64:
            raise InvalidModel(f"max_frame_size {self.max_frame_size} below 64")

    @property
    def frame_rate(self) -> float:
        """Frames per second implied by the interval."""
        return self.max_frames_per_interval * self.interval_denominator / self.interval_numerator

    @property
    def bandwidth_bps(self) -> float:
        return self.frame_rate * self.max_frame_size * 8


@dataclass(frozen=True)
class UserToNetworkRequirements:
    num_seamless_trees: int
    max_latency_us: int

    def __post_init__(self):
        _check_uint("num_seamless_trees", self.num_seamless_trees, 8)
        _check_uint("max_latency_us", self.max_latency_us, 32)
        if self.num_seamless_trees < 1:
            raise InvalidModel("num_seamless_trees must be >= 1")


@dataclass(frozen=True)
class SrpTalkerAdvertise:
    stream_id: StreamId
    traffic_spec: TrafficSpecification
    requirements: UserToNetworkRequirements
    dst_mac_of_stream: bytes

    def __post_init__(self):
        _check_mac("dst_mac_of_stream", self.dst_mac_of_stream)


@dataclass(frozen=True)
class SrpListenerResponse:
    stream_id: StreamId
    talker_status: TalkerStatus


@dataclass(frozen=True)
class RTagFrame:
    """Decoded FRER data frame.

    The encapsulated payload bytes are retained so that encoding a parsed
    frame reproduces it bit-exactly; payload_len derives from them.
    """

    stream_handle: StreamId
    sequence_number: int
    encapsulated_ethertype: int
    payload: bytes = field(default=b"")

    def __post_init__(self):
        _check_uint("sequence_number", self.sequence_number, 16)
        _check_uint("encapsulated_ethertype", self.encapsulated_ethertype, 16)
        if len(self.payload) > MAX_PAYLOAD - RTAG_HEADER_SIZE:
            raise InvalidModel("encapsulated payload too large for one frame")

    @property
    def payload_len(self) -> int:
        return len(self.payload)


def classify(frame: EtherFrame) -> FrameKind:
    """Map a frame to its kind. Total: any input yields exactly one kind."""
    if frame.ethertype == ETHERTYPE_SRP:
        lead = frame.payload[:1]
        if lead == b"\x01":
            return FrameKind.SRP_TALKER
        if lead == b"\x02":
            return FrameKind.SRP_LISTENER
        return FrameKind.OTHER
    if frame.ethertype == ETHERTYPE_FRER:
        return FrameKind.FRER
    return FrameKind.OTHER


def parse_srp(payload: bytes):
    """Parse an SRP payload into a talker advertise or listener response.

    Trailing bytes beyond the fixed layout are ignored; their count is
    len(payload) minus the layout size.

    Raises:
        TruncatedFrame: payload shorter than the fixed layout.
        BadMessageType: first byte is not a known message type.
        BadEnum: talker_status outside {0, 1, 2}.
        InvalidModel: decoded fields violate model invariants.
    """
    if len(payload) < 1:
        raise TruncatedFrame("empty SRP payload")
    msg_type = payload[0]
    if msg_type == MSG_TYPE_TALKER:
        if len(payload) < TALKER_LAYOUT_SIZE:
            raise TruncatedFrame(
                f"talker advertise needs {TALKER_LAYOUT_SIZE} bytes, got {len(payload)}"
            )
        mac, unique_id = _STREAM_ID.unpack_from(payload, 1)
        num, den, frames, size = _TRAFFIC_SPEC.unpack_from(payload, 9)
        trees, latency = _REQUIREMENTS.unpack_from(payload, 21)
        dst = bytes(payload[26:32])
        return SrpTalkerAdvertise(
            stream_id=StreamId(mac, unique_id),
            traffic_spec=TrafficSpecification(num, den, frames, size),
            requirements=UserToNetworkRequirements(trees, latency),
            dst_mac_of_stream=dst,
        )
    if msg_type == MSG_TYPE_LISTENER:
        if len(payload) < LISTENER_LAYOUT_SIZE:
            raise TruncatedFrame(
                f"listener response needs {LISTENER_LAYOUT_SIZE} bytes, got {len(payload)}"
            )
        mac, unique_id = _STREAM_ID.unpack_from(payload, 1)
        status = payload[9]
        try:
            talker_status = TalkerStatus(status)
        except ValueError:
            raise BadEnum(f"talker_status byte {status} outside 0..2") from None
        return SrpListenerResponse(StreamId(mac, unique_id), talker_status)
    raise BadMessageType(f"SRP message type {msg_type} not in {{1, 2}}")


def parse_rtag(frame: EtherFrame) -> RTagFrame:
    """Parse a FRER data frame: R-TAG header plus stream unique id.

    Raises:
        TruncatedFrame: payload shorter than the 8-byte fixed header.
    """
    payload = frame.payload
    if len(payload) < RTAG_HEADER_SIZE:
        raise TruncatedFrame(f"R-TAG header needs {RTAG_HEADER_SIZE} bytes, got {len(payload)}")
    _reserved, seq, encap, unique_id = _RTAG.unpack_from(payload, 0)
    return RTagFrame(
        stream_handle=StreamId(frame.dst_mac, unique_id),
        sequence_number=seq,
        encapsulated_ethertype=encap,
        payload=bytes(payload[RTAG_HEADER_SIZE:]),
    )


def encode(model, src_mac: bytes, dst_mac: bytes | None = None) -> EtherFrame:
    """Encode a frame model back to an Ethernet frame.

    For SRP models dst_mac defaults to the SRP control MAC; for RTagFrame
    the destination is the stream handle MAC and dst_mac, if given, must
    match it.

    Raises:
        InvalidModel: invariant violation or conflicting addressing.
    """
    _check_mac("src_mac", src_mac)
    if isinstance(model, SrpTalkerAdvertise):
        payload = (
            bytes([MSG_TYPE_TALKER])
            + model.stream_id.wire_bytes()
            + _TRAFFIC_SPEC.pack(
                model.traffic_spec.interval_numerator,
                model.traffic_spec.interval_denominator,
                model.traffic_spec.max_frames_per_interval,
                model.traffic_spec.max_frame_size,
            )
            + _REQUIREMENTS.pack(
                model.requirements.num_seamless_trees,
                model.requirements.max_latency_us,
            )
            + model.dst_mac_of_stream
        )
        return EtherFrame(dst_mac or SRP_DST_MAC, src_mac, ETHERTYPE_SRP, payload)
    if isinstance(model, SrpListenerResponse):
        payload = (
            bytes([MSG_TYPE_LISTENER])
            + model.stream_id.wire_bytes()
            + bytes([model.talker_status.value])
        )
        return EtherFrame(dst_mac or SRP_DST_MAC, src_mac, ETHERTYPE_SRP, payload)
    if isinstance(model, RTagFrame):
        handle_mac = model.stream_handle.mac_address
        if dst_mac is not None and dst_mac != handle_mac:
            raise InvalidModel("dst_mac conflicts with the stream handle MAC")
        payload = (
            _RTAG.pack(0, model.sequence_number, model.encapsulated_ethertype,
                       model.stream_handle.unique_id)
            + model.payload
        )
        return EtherFrame(handle_mac, src_mac, ETHERTYPE_FRER, payload)
    raise InvalidModel(f"cannot encode {type(model).__name__}")
