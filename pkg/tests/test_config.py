from __future__ import annotations

import pytest

from jobgrid.config import (
    config_hash,
    parse_kv_document,
    resolve_config,
)
from jobgrid.errors import BadValue, ChannelKindError, UnknownField
from jobgrid.model import SCHEMA


class TestResolveConfig:
    def test_empty_document_yields_full_defaults(self):
        cfg = resolve_config(None, SCHEMA)
        assert cfg.x_field == "submit_time"
        assert cfg.y_field == "queue_wait"
        assert cfg.color_field == "nodes_requested"
        assert cfg.categorical_field == "user"
        assert cfg.facet_field == "queue"
        assert cfg.aggregation == "mean"
        assert (cfg.x_scale, cfg.y_scale) == ("auto", "auto")
        assert (cfg.x_bins, cfg.y_bins) == (40, 20)
        assert cfg.timezone == "UTC"
        assert cfg.share_axes is False

    def test_day_of_week_categorical_override(self):
        cfg = resolve_config("categorical_field = day_of_week\n", SCHEMA)
        assert cfg.categorical_field == "day_of_week"

    def test_categorical_on_numeric_channel_rejected(self):
        with pytest.raises(ChannelKindError):
            resolve_config({"y_field": "user"}, SCHEMA)

    def test_datetime_on_y_rejected(self):
        with pytest.raises(ChannelKindError):
            resolve_config({"y_field": "end_time"}, SCHEMA)

    def test_unknown_field_rejected(self):
        with pytest.raises(UnknownField):
            resolve_config({"x_field": "walltime"}, SCHEMA)

    def test_unknown_key_rejected(self):
        with pytest.raises(BadValue):
            resolve_config({"color": "nodes_requested"}, SCHEMA)

    def test_bad_values_rejected(self):
        with pytest.raises(BadValue):
            resolve_config({"aggregation": "p99"}, SCHEMA)
        with pytest.raises(BadValue):
            resolve_config({"x_bins": "many"}, SCHEMA)
        with pytest.raises(BadValue):
            resolve_config({"y_bins": 0}, SCHEMA)
        with pytest.raises(BadValue):
            resolve_config({"y_scale": "cubic"}, SCHEMA)
        with pytest.raises(BadValue):
            resolve_config({"timezone": "Mars/Olympus"}, SCHEMA)

    def test_datetime_x_requires_auto_scale(self):
        with pytest.raises(BadValue):
            resolve_config({"x_scale": "log"}, SCHEMA)
        cfg = resolve_config({"x_field": "queue_wait", "x_scale": "log"}, SCHEMA)
        assert cfg.x_scale == "log"

    def test_resolution_is_a_fixed_point(self):
        cfg = resolve_config({"y_bins": 12, "aggregation": "max"}, SCHEMA)
        again = resolve_config(cfg.to_kv_document(), SCHEMA)
        assert again == cfg
        assert config_hash(again) == config_hash(cfg)

    def test_hash_changes_with_content(self):
        a = resolve_config(None, SCHEMA)
        b = resolve_config({"y_bins": 21}, SCHEMA)
        assert config_hash(a) != config_hash(b)


class TestKvDocument:
    def test_comments_and_blanks_ignored(self):
        kv = parse_kv_document("# note\n\nx_field = queue_wait  # trailing\n")
        assert kv == {"x_field": "queue_wait"}

    def test_malformed_line_rejected(self):
        with pytest.raises(BadValue):
            parse_kv_document("x_field queue_wait\n")
