"""Detector configuration: thresholds and timers the rules compare against.

Loaded from a JSON file (schema in docs/config-schema.json); every field
has a default so an empty object is a valid config. Unknown keys are
rejected to catch typos early.
"""

import json
from dataclasses import dataclass, field
from typing import Optional

from .errors import InvalidModel
from .routes import RouteConfig
from .state import DEFAULT_FUTURE_MAX, DEFAULT_HISTORY_BITS, DEFAULT_MIN_SAMPLES, RecoveryVariant


@dataclass(frozen=True)
class RateLimit:
    count: int = 10
    window_s: float = 1.0


@dataclass(frozen=True)
class DetectorConfig:
    max_bandwidth_bps: float = 100_000_000.0
    max_frame_rate: float = 10_000.0
    deviation_factor_k: float = 2.0
    request_rate_limit: RateLimit = field(default_factory=RateLimit)
    dangling_timeout_s: float = 30.0
    recovery_timeout_s: float = 2.0
    recovery_variant: RecoveryVariant = RecoveryVariant.MATCH
    vector_history_h: int = DEFAULT_HISTORY_BITS
    vector_future_max: int = DEFAULT_FUTURE_MAX
    sweep_period_s: float = 1.0
    min_samples: int = DEFAULT_MIN_SAMPLES
    dedup_window_s: float = 1.0
    routes: Optional[RouteConfig] = None

    def __post_init__(self):
        positives = {
            "max_bandwidth_bps": self.max_bandwidth_bps,
            "max_frame_rate": self.max_frame_rate,
            "dangling_timeout_s": self.dangling_timeout_s,
            "recovery_timeout_s": self.recovery_timeout_s,
            "sweep_period_s": self.sweep_period_s,
            "dedup_window_s": self.dedup_window_s,
            "rate limit count": self.request_rate_limit.count,
            "rate limit window_s": self.request_rate_limit.window_s,
            "vector_history_h": self.vector_history_h,
            "vector_future_max": self.vector_future_max,
            "min_samples": self.min_samples,
        }
        for name, value in positives.items():
            if not value > 0:
                raise InvalidModel(f"{name} must be > 0, got {value}")
        if not self.deviation_factor_k > 1:
            raise InvalidModel(f"deviation_factor_k must be > 1, got {self.deviation_factor_k}")


_SIMPLE_KEYS = {
    "max_bandwidth_bps": float,
    "max_frame_rate": float,
    "deviation_factor_k": float,
    "dangling_timeout_s": float,
    "recovery_timeout_s": float,
    "sweep_period_s": float,
    "dedup_window_s": float,
    "vector_history_h": int,
    "vector_future_max": int,
    "min_samples": int,
}


def config_from_dict(body: dict) -> DetectorConfig:
    if not isinstance(body, dict):
        raise InvalidModel("config must be a JSON object")
    known = set(_SIMPLE_KEYS) | {"request_rate_limit", "recovery_variant", "routes"}
    unknown = set(body) - known
    if unknown:
        raise InvalidModel(f"unknown config keys {sorted(unknown)}")
    kwargs = {}
    for key, cast in _SIMPLE_KEYS.items():
        if key in body:
            kwargs[key] = cast(body[key])
    if "request_rate_limit" in body:
        raw = body["request_rate_limit"]
        try:
            kwargs["request_rate_limit"] = RateLimit(int(raw["count"]), float(raw["window_s"]))
        except (KeyError, TypeError) as exc:
            raise InvalidModel(f"request_rate_limit needs count and window_s: {exc}") from None
    if "recovery_variant" in body:
        try:
            kwargs["recovery_variant"] = RecoveryVariant(body["recovery_variant"])
        except ValueError:
            raise InvalidModel(
                f"recovery_variant must be 'match' or 'vector', got {body['recovery_variant']!r}"
            ) from None
    if "routes" in body and body["routes"] is not None:
        kwargs["routes"] = RouteConfig.from_dict(body["routes"])
    return DetectorConfig(**kwargs)


def load_config(path) -> DetectorConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            body = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidModel(f"config file is not valid JSON: {exc}") from None
    return config_from_dict(body)


def config_to_dict(config: DetectorConfig) -> dict:
    """Inverse of config_from_dict, used when fixtures embed their config."""
    body = {key: getattr(config, key) for key in _SIMPLE_KEYS}
    body["request_rate_limit"] = {
        "count": config.request_rate_limit.count,
        "window_s": config.request_rate_limit.window_s,
    }
    body["recovery_variant"] = config.recovery_variant.value
    if config.routes is not None:
        body["routes"] = {
            "streams": [
                {"stream_id": s.stream_id.hex(), "paths": [list(p) for p in s.paths]}
                for s in config.routes.streams
            ]
        }
    return body
