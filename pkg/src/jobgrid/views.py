"""Assembles complete per-facet view bundles: summary grid, marginal
histograms, conditional histogram, categorical top-k, and legend.

All sub-views of a bundle are computed over one scope: the rows passing
the category filter whose x, y, and color values are all present. Brushes
never change the scope; they drive the selection (legend count, cell
highlights, export set).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .binning import AxisBinning, GridView, _json_number, bin_axis, build_grid
from .config import EncodingConfig, config_hash
from .errors import ColumnOutOfRange, UnknownField
from .model import CATEGORICAL, JobTable
from .selection import SessionState, filter_mask, selected_count


@dataclass(frozen=True)
class HistogramView:
    binning: AxisBinning
    counts: np.ndarray
    orientation: str  # "x" or "y"

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_document(self, include_binning: bool = False) -> dict:
        doc: dict = {"orientation": self.orientation}
        if include_binning:
            doc["binning"] = self.binning.to_document()
        doc["counts"] = [int(c) for c in self.counts]
        return doc


@dataclass(frozen=True)
class CategoricalView:
    field_name: str
    entries: tuple  # ((label, count), ...) counts nonincreasing
    truncated: bool

    def to_document(self) -> dict:
        return {
            "field": self.field_name,
            "entries": [[label, int(count)] for label, count in self.entries],
            "truncated": self.truncated,
        }


@dataclass(frozen=True)
class ViewBundle:
    facet_label: str | None
    scope_ids: np.ndarray
    grid: GridView
    x_histogram: HistogramView
    y_histogram: HistogramView
    categorical: CategoricalView
    selected_count: int
    color_extents: tuple[float, float] | None
    highlighted: tuple  # ((col, row), ...) cells holding >= 1 selected record
    missing: dict  # channel -> count of filter-passing rows missing its value

    def to_document(self) -> dict:
        ext = self.color_extents
        return {
            "facet": self.facet_label,
            "scope_count": int(len(self.scope_ids)),
            "missing": {k: int(v) for k, v in self.missing.items()},
            "grid": self.grid.to_document(),
            "x_histogram": self.x_histogram.to_document(),
            "y_histogram": self.y_histogram.to_document(),
            "categorical": self.categorical.to_document(),
            "highlighted": [[int(c), int(r)] for c, r in self.highlighted],
            "legend": {
                "selected_count": int(self.selected_count),
                "color_min": None if ext is None else _json_number(ext[0]),
                "color_max": None if ext is None else _json_number(ext[1]),
            },
        }


def top_categories(table: JobTable, scope_ids: np.ndarray, field_name: str, k: int = 10) -> CategoricalView:
    """The k most frequent labels of a categorical field within scope,
    counts descending, ties broken by label."""
    if table.field_kind(field_name) != CATEGORICAL:
        raise UnknownField(f"field {field_name!r} is not categorical")
    cat = table.categorical(field_name)
    codes = cat.codes[np.asarray(scope_ids, dtype=np.int64)]
    codes = codes[codes >= 0]
    counts = np.bincount(codes, minlength=len(cat.labels))
    present = np.nonzero(counts)[0]
    ranked = sorted(((int(counts[c]), cat.labels[c]) for c in present), key=lambda e: (-e[0], e[1]))
    return CategoricalView(
        field_name=field_name,
        entries=tuple((label, count) for count, label in ranked[:k]),
        truncated=len(ranked) > k,
    )


def facet_partition(table: JobTable, facet_field: str) -> tuple[list[tuple[str, np.ndarray]], int]:
    """Facet labels of the unfiltered table with their row ids, ordered by
    descending record count then label, plus the missing-facet row count."""
    cat = table.categorical(facet_field)
    counts = np.bincount(cat.codes[cat.codes >= 0], minlength=len(cat.labels))
    order = sorted(
        (c for c in range(len(cat.labels)) if counts[c] > 0),
        key=lambda c: (-int(counts[c]), cat.labels[c]),
    )
    parts = [(cat.labels[c], np.nonzero(cat.codes == c)[0].astype(np.int64)) for c in order]
    missing = int(np.count_nonzero(cat.codes < 0))
    return parts, missing


def _scope_and_missing(
    table: JobTable, config: EncodingConfig, base_mask: np.ndarray
) -> tuple[np.ndarray, dict]:
    channels = {
        "x": config.x_field,
        "y": config.y_field,
        "color": config.color_field,
        "categorical": config.categorical_field,
    }
    missing = {}
    scope_mask = base_mask.copy()
    for channel in ("x", "y", "color"):
        present = table.present_mask(channels[channel])
        missing[channel] = int(np.count_nonzero(base_mask & ~present))
        scope_mask &= present
    missing["categorical"] = int(
        np.count_nonzero(base_mask & ~table.present_mask(channels["categorical"]))
    )
    return np.nonzero(scope_mask)[0].astype(np.int64), missing


def _shared_binnings(table: JobTable, config: EncodingConfig, session: SessionState | None):
    """Axis binnings over the whole filtered table, used when facets share axes."""
    base = filter_mask(table, config, session.filter) if session is not None else np.ones(
        table.n_rows, dtype=bool
    )
    scope_ids, _ = _scope_and_missing(table, config, base)
    return _axis_binnings(table, config, scope_ids)


def _axis_binnings(table: JobTable, config: EncodingConfig, scope_ids: np.ndarray):
    xs = table.numeric_values(config.x_field)[scope_ids]
    ys = table.numeric_values(config.y_field)[scope_ids]
    x_binning = bin_axis(
        xs, table.field_kind(config.x_field), config.x_scale, config.x_bins, config.timezone
    )
    y_binning = bin_axis(
        ys, table.field_kind(config.y_field), config.y_scale, config.y_bins, config.timezone
    )
    return x_binning, y_binning


def compose_unit(
    table: JobTable,
    config: EncodingConfig,
    session: SessionState | None = None,
    facet_label: str | None = None,
    facet_ids: np.ndarray | None = None,
    binnings: tuple[AxisBinning, AxisBinning] | None = None,
) -> ViewBundle:
    """Compose one unit's bundle over the rows passing the category filter
    (restricted to one facet when given)."""
    base = np.zeros(table.n_rows, dtype=bool)
    if facet_ids is None:
        base[:] = True
    else:
        base[facet_ids] = True
    if session is not None:
        base &= filter_mask(table, config, session.filter)

    scope_ids, missing = _scope_and_missing(table, config, base)
    x_binning, y_binning = binnings if binnings is not None else _axis_binnings(
        table, config, scope_ids
    )

    grid = build_grid(
        table,
        scope_ids,
        config.x_field,
        config.y_field,
        config.color_field,
        config.aggregation,
        x_binning,
        y_binning,
    )
    x_hist = HistogramView(x_binning, grid.counts.sum(axis=1), "x")
    y_hist = HistogramView(y_binning, grid.counts.sum(axis=0), "y")
    categorical = top_categories(table, scope_ids, config.categorical_field)

    n_selected = 0
    highlighted: tuple = ()
    if session is not None and len(session.selected_ids) > 0:
        n_selected = selected_count(session, facet_label)
        sel_mask = np.zeros(table.n_rows, dtype=bool)
        sel_mask[session.selected_ids] = True
        highlighted = tuple(
            sorted(cell for cell, ids in grid.cell_ids.items() if sel_mask[ids].any())
        )

    return ViewBundle(
        facet_label=facet_label,
        scope_ids=scope_ids,
        grid=grid,
        x_histogram=x_hist,
        y_histogram=y_hist,
        categorical=categorical,
        selected_count=n_selected,
        color_extents=grid.aggregate_extents(),
        highlighted=highlighted,
        missing=missing,
    )


def facet_views(
    table: JobTable, config: EncodingConfig, session: SessionState | None = None
) -> list[ViewBundle]:
    """One bundle per facet value of the unfiltered table (so the small
    multiples stay stable under filters), ordered by size then label."""
    parts, _ = facet_partition(table, config.facet_field)
    shared = _shared_binnings(table, config, session) if config.share_axes else None
    return [
        compose_unit(table, config, session, facet_label=label, facet_ids=ids, binnings=shared)
        for label, ids in parts
    ]


def conditional_y_histogram(grid: GridView, column_index: int) -> HistogramView:
    """The y histogram restricted to the records of one grid column."""
    if not 0 <= column_index < grid.n_cols:
        raise ColumnOutOfRange(f"column {column_index} outside [0, {grid.n_cols})")
    return HistogramView(grid.y_binning, grid.counts[column_index].copy(), "y")


def histogram_quantile(binning: AxisBinning, counts: np.ndarray, q: float) -> float | None:
    """Quantile estimate from binned counts, interpolating within the bin
    (geometrically under a log scale). The nonpositive bin reads as 0."""
    total = int(np.sum(counts))
    if total == 0:
        return None
    if binning.degenerate:
        return float(binning.edges[0])
    target = q * total
    acc = 0.0
    for i, c in enumerate(counts):
        if acc + c < target:
            acc += c
            continue
        bounds = bin_bounds(binning, i)
        if bounds is None:  # nonpositive bin
            return 0.0
        lo, hi = bounds
        frac = 0.5 if c == 0 else (target - acc) / c
        if binning.scale == "log":
            return float(lo * (hi / lo) ** frac)
        return float(lo + (hi - lo) * frac)
    return float(binning.edges[-1])


def bin_bounds(binning: AxisBinning, index: int) -> tuple[float, float] | None:
    """Edge pair of a bin by index; None for the dedicated nonpositive bin."""
    if binning.has_nonpositive_bin:
        if index == 0:
            return None
        index -= 1
    return float(binning.edges[index]), float(binning.edges[index + 1])


def serialize_views(
    bundles: list[ViewBundle],
    config: EncodingConfig,
    revision: int | None = None,
    excluded_missing_facet: int | None = None,
) -> dict:
    doc: dict = {"config_hash": config_hash(config)}
    if revision is not None:
        doc["revision"] = int(revision)
    if excluded_missing_facet is not None:
        doc["excluded_missing_facet"] = int(excluded_missing_facet)
    doc["facets"] = [b.to_document() for b in bundles]
    return doc


def document_to_json(doc: dict) -> str:
    """Wire formatting for view documents: stable key order, two-space
    indent, trailing newline."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
