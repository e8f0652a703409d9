"""Encoding configuration: which fields feed the x/y/color/categorical/facet
channels, plus aggregation, scale, and bin-count choices.

Configuration lives in a small key-value text document (``key = value``
lines, ``#`` comments) or arrives as a mapping in a service message; both
resolve to the same EncodingConfig.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .binning import AGGREGATIONS
from .errors import BadValue, ChannelKindError, UnknownField
from .model import CATEGORICAL, DATETIME, NUMERIC_KINDS

SCALES = ("auto", "linear", "log")

DEFAULTS = {
    "x_field": "submit_time",
    "y_field": "queue_wait",
    "color_field": "nodes_requested",
    "categorical_field": "user",
    "facet_field": "queue",
    "aggregation": "mean",
    "x_scale": "auto",
    "y_scale": "auto",
    "x_bins": 40,
    "y_bins": 20,
    "timezone": "UTC",
    "share_axes": False,
}


@dataclass(frozen=True)
class EncodingConfig:
    x_field: str
    y_field: str
    color_field: str
    categorical_field: str
    facet_field: str
    aggregation: str
    x_scale: str
    y_scale: str
    x_bins: int
    y_bins: int
    timezone: str
    share_axes: bool = False

    def to_kv_document(self) -> str:
        lines = [f"{key} = {_format_value(getattr(self, key))}" for key in DEFAULTS]
        return "\n".join(lines) + "\n"

    def to_mapping(self) -> dict:
        return {key: getattr(self, key) for key in DEFAULTS}


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def parse_kv_document(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment, blanks ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BadValue(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def config_hash(cfg: EncodingConfig) -> str:
    digest = hashlib.sha256(cfg.to_kv_document().encode("utf-8")).hexdigest()
    return digest[:12]


_CHANNEL_KINDS = {
    "x_field": (DATETIME,) + NUMERIC_KINDS,
    "y_field": NUMERIC_KINDS,
    "color_field": NUMERIC_KINDS,
    "categorical_field": (CATEGORICAL,),
    "facet_field": (CATEGORICAL,),
}


def resolve_config(document, schema: dict[str, str]) -> EncodingConfig:
    """Apply defaults, overrides, and schema validation.

    ``document`` may be a key-value text document, a mapping, or None
    (pure defaults). Raises UnknownField / ChannelKindError / BadValue.
    """
    if document is None:
        overrides: dict = {}
    elif isinstance(document, str):
        overrides = parse_kv_document(document)
    else:
        overrides = dict(document)

    merged = dict(DEFAULTS)
    for key, value in overrides.items():
        if key not in DEFAULTS:
            raise BadValue(f"unknown configuration key {key!r}")
        merged[key] = value

    cfg = EncodingConfig(
        x_field=str(merged["x_field"]),
        y_field=str(merged["y_field"]),
        color_field=str(merged["color_field"]),
        categorical_field=str(merged["categorical_field"]),
        facet_field=str(merged["facet_field"]),
        aggregation=str(merged["aggregation"]),
        x_scale=str(merged["x_scale"]),
        y_scale=str(merged["y_scale"]),
        x_bins=_parse_int(merged["x_bins"], "x_bins"),
        y_bins=_parse_int(merged["y_bins"], "y_bins"),
        timezone=str(merged["timezone"]),
        share_axes=_parse_bool(merged["share_axes"], "share_axes"),
    )
    validate_config(cfg, schema)
    return cfg


def validate_config(cfg: EncodingConfig, schema: dict[str, str]) -> None:
    for channel, allowed in _CHANNEL_KINDS.items():
        field_name = getattr(cfg, channel)
        kind = schema.get(field_name)
        if kind is None:
            raise UnknownField(f"{channel} names unknown field {field_name!r}")
        if kind not in allowed:
            raise ChannelKindError(
                f"{channel} field {field_name!r} has kind {kind}, needs one of {allowed}"
            )
    if cfg.aggregation not in AGGREGATIONS:
        raise BadValue(f"aggregation must be one of {AGGREGATIONS}, got {cfg.aggregation!r}")
    for name, scale in (("x_scale", cfg.x_scale), ("y_scale", cfg.y_scale)):
        if scale not in SCALES:
            raise BadValue(f"{name} must be one of {SCALES}, got {scale!r}")
    if schema[cfg.x_field] == DATETIME and cfg.x_scale != "auto":
        raise BadValue("a datetime x axis bins by calendar unit; x_scale must stay auto")
    if cfg.x_bins < 1 or cfg.y_bins < 1:
        raise BadValue("bin counts must be >= 1")
    # Surface bad timezone names at resolve time, not first use.
    from .model import parse_timezone

    parse_timezone(cfg.timezone)


def _parse_int(value, key: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise BadValue(f"{key} must be an integer, got {value!r}") from None


def _parse_bool(value, key: str) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("true", "yes", "1"):
        return True
    if text in ("false", "no", "0"):
        return False
    raise BadValue(f"{key} must be a boolean, got {value!r}")
