"""Brush selections, hover/pin category filters, and per-session state.

Category filters (pins plus a transient hover) compose by OR within the
configured categorical field and change the scope every view is computed
over. Brushes are per-facet closed intervals in data units over the x
and/or y axis; coexisting ranges intersect. The selection (the record
set behind the legend count and the export) is opt-in: no brush means an
empty selection, however the views are filtered.
"""

from __future__ import annotations

import json
import time as _time
from dataclasses import dataclass, field, replace

import numpy as np

from .config import EncodingConfig, config_hash
from .errors import BadValue, UnknownFacet, UnknownLabel
from .model import JobRecord, JobTable


@dataclass(frozen=True)
class FilterState:
    pinned_labels: frozenset[str] = frozenset()
    hover_label: str | None = None

    @property
    def empty(self) -> bool:
        return not self.pinned_labels and self.hover_label is None

    def active_labels(self) -> frozenset[str]:
        if self.hover_label is None:
            return self.pinned_labels
        return self.pinned_labels | {self.hover_label}


@dataclass(frozen=True)
class BrushState:
    """Closed-interval ranges in data units; a None range leaves that axis
    unconstrained. ``facet`` scopes the brush to one small-multiple unit
    (None applies it to every facet)."""

    facet: str | None = None
    x_range: tuple[float, float] | None = None
    y_range: tuple[float, float] | None = None

    def __post_init__(self):
        for rng in (self.x_range, self.y_range):
            if rng is not None and rng[0] > rng[1]:
                raise ValueError(f"brush interval lo > hi: {rng}")

    @property
    def empty(self) -> bool:
        return self.x_range is None and self.y_range is None


def filter_predicate(record: JobRecord, state: FilterState, field_name: str = "user") -> bool:
    """True when no filter is active or the record's label is pinned/hovered."""
    if state.empty:
        return True
    return getattr(record, field_name) in state.active_labels()


def brush_predicate(record: JobRecord, brush: BrushState, config: EncodingConfig) -> bool:
    """True when the brush applies to the record's facet and both set ranges
    contain the record's bound channel values (closed intervals)."""
    if brush.facet is not None and getattr(record, config.facet_field) != brush.facet:
        return False
    for rng, field_name in ((brush.x_range, config.x_field), (brush.y_range, config.y_field)):
        if rng is None:
            continue
        value = getattr(record, field_name)
        if value is None or not rng[0] <= value <= rng[1]:
            return False
    return True


def filter_mask(table: JobTable, config: EncodingConfig, state: FilterState) -> np.ndarray:
    """Vectorized filter_predicate over all rows."""
    if state.empty:
        return np.ones(table.n_rows, dtype=bool)
    cat = table.categorical(config.categorical_field)
    wanted = {cat.labels.index(lbl) for lbl in state.active_labels() if lbl in cat.labels}
    if not wanted:
        return np.zeros(table.n_rows, dtype=bool)
    return np.isin(cat.codes, np.fromiter(wanted, dtype=np.int32))


def _range_mask(values: np.ndarray, rng: tuple[float, float] | None) -> np.ndarray:
    if rng is None:
        return np.ones(len(values), dtype=bool)
    return (values >= rng[0]) & (values <= rng[1])  # NaN compares False


def compute_selected_ids(
    table: JobTable,
    config: EncodingConfig,
    state: FilterState,
    brushes: dict[str | None, BrushState],
) -> np.ndarray:
    """The selected-record id set, recomputed from scratch: records passing
    the category filter and, within their facet, every set brush range."""
    active = {f: b for f, b in brushes.items() if not b.empty}
    if not active:
        return np.array([], dtype=np.int64)

    fmask = filter_mask(table, config, state)
    xs = table.numeric_values(config.x_field)
    ys = table.numeric_values(config.y_field)
    facet_cat = table.categorical(config.facet_field)

    selected = np.zeros(table.n_rows, dtype=bool)
    for facet, brush in active.items():
        if facet is None:
            fac_mask = facet_cat.codes >= 0
        else:
            code = facet_cat.labels.index(facet) if facet in facet_cat.labels else -2
            fac_mask = facet_cat.codes == code
        selected |= fac_mask & fmask & _range_mask(xs, brush.x_range) & _range_mask(ys, brush.y_range)
    return np.nonzero(selected)[0].astype(np.int64)


@dataclass(frozen=True)
class Mutation:
    op: str  # set_brush | clear_brush | pin | unpin | hover | clear_hover | set_encoding
    facet: str | None = None
    x_range: tuple[float, float] | None = None
    y_range: tuple[float, float] | None = None
    label: str | None = None
    config: EncodingConfig | None = None


@dataclass(frozen=True)
class SessionState:
    """Per-client interaction state. Immutable: every mutation produces a
    new state with the revision bumped and the selection recomputed."""

    table: JobTable = field(repr=False)
    config: EncodingConfig
    filter: FilterState = FilterState()
    brushes: dict = field(default_factory=dict)  # facet label -> BrushState
    selected_ids: np.ndarray = field(default_factory=lambda: np.array([], dtype=np.int64))
    revision: int = 0
    stamp: str = ""

    def state_key(self) -> str:
        """Canonical fingerprint of (config, filters, brushes); equal states
        share cache entries regardless of mutation history."""
        doc = {
            "config": config_hash(self.config),
            "pins": sorted(self.filter.pinned_labels),
            "hover": self.filter.hover_label,
            "brushes": {
                str(f): {"x": b.x_range, "y": b.y_range}
                for f, b in sorted(self.brushes.items(), key=lambda kv: str(kv[0]))
                if not b.empty
            },
        }
        return json.dumps(doc, sort_keys=True)


def new_session(table: JobTable, config: EncodingConfig, stamp: str | None = None) -> SessionState:
    return SessionState(
        table=table,
        config=config,
        stamp=stamp if stamp is not None else _now_stamp(),
    )


def _now_stamp() -> str:
    return _time.strftime("%Y-%m-%dT%H:%M:%SZ", _time.gmtime())


def _facet_domain(table: JobTable, config: EncodingConfig) -> list[str]:
    return table.categorical(config.facet_field).labels


def _label_domain(table: JobTable, config: EncodingConfig) -> list[str]:
    return table.categorical(config.categorical_field).labels


def update_state(session: SessionState, mutation: Mutation, stamp: str | None = None) -> SessionState:
    """Apply one mutation: validate it, derive the new filter/brush state,
    and recompute the selection from scratch."""
    table, config = session.table, session.config
    filt, brushes = session.filter, dict(session.brushes)

    if mutation.op == "set_brush":
        if mutation.facet is not None and mutation.facet not in _facet_domain(table, config):
            raise UnknownFacet(f"no facet {mutation.facet!r}")
        brushes[mutation.facet] = BrushState(
            facet=mutation.facet, x_range=mutation.x_range, y_range=mutation.y_range
        )
    elif mutation.op == "clear_brush":
        if mutation.facet is None:
            brushes = {}
        elif mutation.facet in brushes:
            del brushes[mutation.facet]
        elif mutation.facet not in _facet_domain(table, config):
            raise UnknownFacet(f"no facet {mutation.facet!r}")
    elif mutation.op in ("pin", "unpin", "hover"):
        if mutation.label not in _label_domain(table, config):
            raise UnknownLabel(
                f"no label {mutation.label!r} in field {config.categorical_field!r}"
            )
        if mutation.op == "pin":
            filt = replace(filt, pinned_labels=filt.pinned_labels | {mutation.label})
        elif mutation.op == "unpin":
            filt = replace(filt, pinned_labels=filt.pinned_labels - {mutation.label})
        else:
            filt = replace(filt, hover_label=mutation.label)
    elif mutation.op == "clear_hover":
        filt = replace(filt, hover_label=None)
    elif mutation.op == "set_encoding":
        if mutation.config is None:
            raise BadValue("set_encoding requires a config")
        new_config = mutation.config
        brushes = {}  # brush ranges are tied to the previous fields' units
        if new_config.categorical_field != config.categorical_field:
            filt = FilterState()
        config = new_config
    else:
        raise BadValue(f"unknown mutation op {mutation.op!r}")

    return SessionState(
        table=table,
        config=config,
        filter=filt,
        brushes=brushes,
        selected_ids=compute_selected_ids(table, config, filt, brushes),
        revision=session.revision + 1,
        stamp=stamp if stamp is not None else _now_stamp(),
    )


def selected_count(session: SessionState, facet: str | None = None) -> int:
    """Number of selected records, optionally restricted to one facet."""
    if facet is None:
        return int(len(session.selected_ids))
    cat = session.table.categorical(session.config.facet_field)
    if facet not in cat.labels:
        raise UnknownFacet(f"no facet {facet!r}")
    code = cat.labels.index(facet)
    return int(np.count_nonzero(cat.codes[session.selected_ids] == code))
