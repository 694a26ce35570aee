"""Exception hierarchy shared across the toolkit.

Parsers and codecs raise WireError subclasses only; capture I/O raises
CaptureError subclasses or plain OSError for filesystem failures.
"""


class TsnMonError(Exception):
    """Base class for all toolkit errors."""


class WireError(TsnMonError):
    """Base class for frame codec errors."""


class TruncatedFrame(WireError):
    """Payload shorter than the fixed layout it claims to carry."""


class BadMessageType(WireError):
    """SRP message-type byte is not a known value."""


class BadEnum(WireError):
    """A wire enum field holds an out-of-range value."""


class InvalidModel(WireError):
    """A frame model violates its invariants (also raised on encode)."""


class CaptureError(TsnMonError):
    """Base class for capture file errors."""


class BadMagic(CaptureError):
    """Capture file does not start with a supported pcap magic."""


class UnsupportedLinkType(CaptureError):
    """Capture link type is not Ethernet."""


class TruncatedRecord(CaptureError):
    """Capture record header or body is cut short."""


class BusClosed(TsnMonError):
    """Publish or subscribe attempted on a closed event bus."""


class MalformedRoute(TsnMonError):
    """A configured member-stream path is structurally invalid."""


class InvalidScript(TsnMonError):
    """A scenario script violates its invariants."""
