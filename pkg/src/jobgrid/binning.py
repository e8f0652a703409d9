"""Axis scale inference, bin-edge computation, and 2D grid aggregation.

Numeric axes bin linearly by default and switch to geometrically spaced
edges when the positive values span at least two orders of magnitude.
Datetime axes bin into calendar-aligned hours, days, or months. Bin
intervals are half-open [lo, hi) with the last bin closed; values of zero
or below under a log scale land in a dedicated bin prepended to the
geometric ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, time, timedelta, tzinfo

import numpy as np

from .errors import ChannelKindError, ColumnOutOfRange, DomainError
from .model import (
    DATETIME,
    NUMERIC_KINDS,
    JobTable,
    parse_timezone,
)

LINEAR = "linear"
LOG = "log"

HOUR = "hour"
DAY = "day"
MONTH = "month"

AGGREGATIONS = ("mean", "median", "sum", "count", "max")

# One datetime column per unit, coarsening past this many columns.
DATETIME_COLUMN_CAP = 366

LOG_SCALE_RATIO = 100.0  # two orders of magnitude


def infer_scale(values: np.ndarray) -> str:
    """Choose linear or log binning for a numeric value multiset. Log wins
    only when at least two positive values span a >= 100x ratio."""
    values = np.asarray(values, dtype=np.float64)
    positive = values[values > 0]
    if len(positive) < 2:
        return LINEAR
    lo, hi = float(positive.min()), float(positive.max())
    return LOG if hi / lo >= LOG_SCALE_RATIO else LINEAR


def log_space_edges(lo: float, hi: float, n: int) -> np.ndarray:
    """n+1 geometrically spaced edges from lo to hi (endpoints exact)."""
    if lo <= 0:
        raise DomainError(f"log edges need lo > 0, got {lo}")
    if lo >= hi:
        raise DomainError(f"log edges need lo < hi, got [{lo}, {hi}]")
    if n < 1:
        raise DomainError(f"need at least one interval, got n={n}")
    edges = np.geomspace(lo, hi, n + 1)
    edges[0] = lo
    edges[-1] = hi
    return edges


def datetime_bin_unit(range_seconds: float) -> str:
    """Calendar unit for a datetime axis: hours up to 96 h, days up to
    400 days, months beyond."""
    if range_seconds <= 0:
        raise DomainError(f"datetime range must be positive, got {range_seconds}")
    if range_seconds <= 96 * 3600:
        return HOUR
    if range_seconds <= 400 * 86400:
        return DAY
    return MONTH


@dataclass(frozen=True)
class AxisBinning:
    """A resolved axis: scale kind and ordered bin edges.

    ``edges`` holds n+1 strictly increasing boundaries for n interval bins.
    Under a log scale with nonpositive values in scope, one extra bin is
    prepended (bin index 0) and the geometric bins shift up by one; the
    edges themselves stay positive. A degenerate axis (all values equal)
    is a single [v, v] bin.
    """

    scale: str
    edges: np.ndarray
    unit: str | None = None
    has_nonpositive_bin: bool = False
    degenerate: bool = False

    @property
    def n_bins(self) -> int:
        if self.degenerate:
            return 1
        if len(self.edges) == 0:
            return 0
        return len(self.edges) - 1 + int(self.has_nonpositive_bin)

    def bin_index(self, values: np.ndarray) -> np.ndarray:
        """Vectorized bin assignment; -1 for values outside the covered
        range. Interior edges belong to the higher bin, the top edge to the
        last bin (and the nonpositive bin catches values <= 0)."""
        values = np.asarray(values, dtype=np.float64)
        if self.n_bins == 0:
            return np.full(len(values), -1, dtype=np.int64)
        if self.degenerate:
            return np.where(values == self.edges[0], 0, -1).astype(np.int64)
        idx = np.searchsorted(self.edges, values, side="right") - 1
        n_intervals = len(self.edges) - 1
        idx[values == self.edges[-1]] = n_intervals - 1  # last bin closed
        out_of_range = (values < self.edges[0]) | (values > self.edges[-1])
        if self.has_nonpositive_bin:
            idx = idx + 1
            idx[values <= 0] = 0
            out_of_range &= values > 0
        idx[out_of_range] = -1
        return idx.astype(np.int64)

    def to_document(self) -> dict:
        return {
            "scale": self.scale,
            "unit": self.unit,
            "edges": [_json_number(e) for e in self.edges],
            "has_nonpositive_bin": self.has_nonpositive_bin,
            "degenerate": self.degenerate,
        }


def _json_number(x: float):
    return int(x) if float(x).is_integer() and abs(x) < 2**53 else float(x)


EMPTY_BINNING = AxisBinning(scale=LINEAR, edges=np.array([], dtype=np.float64))


def _floor_to_unit(epoch: float, unit: str, tz: tzinfo) -> datetime:
    local = datetime.fromtimestamp(int(epoch), tz)
    if unit == HOUR:
        return local.replace(minute=0, second=0, microsecond=0)
    if unit == DAY:
        return datetime.combine(local.date(), time(), tzinfo=tz)
    return datetime.combine(local.date().replace(day=1), time(), tzinfo=tz)


def _next_boundary(local: datetime, unit: str, tz: tzinfo) -> datetime:
    if unit == HOUR:
        return local + timedelta(hours=1)
    if unit == DAY:
        return datetime.combine(local.date() + timedelta(days=1), time(), tzinfo=tz)
    d = local.date()
    first = d.replace(year=d.year + 1, month=1) if d.month == 12 else d.replace(month=d.month + 1)
    return datetime.combine(first, time(), tzinfo=tz)


def datetime_edges(lo: float, hi: float, unit: str, tz: tzinfo) -> np.ndarray:
    """Unit-aligned epoch-second edges covering [lo, hi]: first edge is the
    unit floor of lo, last edge the first boundary at or past hi."""
    edges = [_floor_to_unit(lo, unit, tz)]
    while edges[-1].timestamp() < hi:
        edges.append(_next_boundary(edges[-1], unit, tz))
    return np.array([e.timestamp() for e in edges], dtype=np.float64)


def bin_axis(
    values: np.ndarray,
    field_kind: str,
    requested_scale: str = "auto",
    n_bins: int = 40,
    tz: tzinfo | str = "UTC",
) -> AxisBinning:
    """Resolve an axis binning over the in-scope values of a channel.

    Numeric fields honor ``requested_scale`` (auto infers); datetime fields
    bin by calendar unit chosen from the value range, one column per unit
    up to a cap, coarsening the unit when the cap is exceeded.
    """
    values = np.asarray(values, dtype=np.float64)
    if len(values) == 0:
        return EMPTY_BINNING
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        return AxisBinning(
            scale=LINEAR if field_kind != DATETIME else DATETIME,
            edges=np.array([lo, lo]),
            unit=None,
            degenerate=True,
        )

    if field_kind == DATETIME:
        if isinstance(tz, str):
            tz = parse_timezone(tz)
        unit = datetime_bin_unit(hi - lo)
        edges = datetime_edges(lo, hi, unit, tz)
        while len(edges) - 1 > DATETIME_COLUMN_CAP and unit != MONTH:
            unit = DAY if unit == HOUR else MONTH
            edges = datetime_edges(lo, hi, unit, tz)
        return AxisBinning(scale=DATETIME, edges=edges, unit=unit)

    scale = infer_scale(values) if requested_scale == "auto" else requested_scale
    if scale == LOG:
        positive = values[values > 0]
        if len(positive) >= 2 and positive.min() < positive.max():
            edges = log_space_edges(float(positive.min()), hi, n_bins)
            return AxisBinning(
                scale=LOG,
                edges=edges,
                has_nonpositive_bin=bool((values <= 0).any()),
            )
        scale = LINEAR  # no positive dynamic range to spread bins over
    return AxisBinning(scale=LINEAR, edges=np.linspace(lo, hi, n_bins + 1))


@dataclass
class GridView:
    """The binned rectangle grid: per-cell record ids, counts, and one
    aggregated color value per nonempty cell."""

    x_binning: AxisBinning
    y_binning: AxisBinning
    counts: np.ndarray  # [n_cols, n_rows] int64
    aggregates: np.ndarray  # [n_cols, n_rows] float64, NaN where absent
    color_field: str
    aggregation: str
    cell_ids: dict = field(default_factory=dict)  # (col, row) -> sorted id array

    @property
    def n_cols(self) -> int:
        return self.counts.shape[0]

    @property
    def n_rows(self) -> int:
        return self.counts.shape[1]

    def column_ids(self, col: int) -> np.ndarray:
        if not 0 <= col < self.n_cols:
            raise ColumnOutOfRange(f"column {col} outside [0, {self.n_cols})")
        parts = [ids for (c, _), ids in self.cell_ids.items() if c == col]
        if not parts:
            return np.array([], dtype=np.int64)
        return np.sort(np.concatenate(parts))

    def aggregate_extents(self) -> tuple[float, float] | None:
        """(min, max) over nonempty cell aggregates, None for an empty grid."""
        vals = self.aggregates[~np.isnan(self.aggregates)]
        if len(vals) == 0:
            return None
        return float(vals.min()), float(vals.max())

    def to_document(self) -> dict:
        return {
            "x": self.x_binning.to_document(),
            "y": self.y_binning.to_document(),
            "color_field": self.color_field,
            "aggregation": self.aggregation,
            "counts": self.counts.tolist(),
            "aggregates": [
                [None if np.isnan(v) else _json_number(v) for v in col]
                for col in self.aggregates
            ],
        }


def _check_channel(field_name: str, kind: str, channel: str) -> None:
    allowed = {
        "x": (DATETIME,) + NUMERIC_KINDS,
        "y": NUMERIC_KINDS,
        "color": NUMERIC_KINDS,
    }[channel]
    if kind not in allowed:
        raise ChannelKindError(
            f"field {field_name!r} ({kind}) cannot bind to the {channel} channel"
        )


def build_grid(
    table: JobTable,
    scope_ids: np.ndarray,
    x_field: str,
    y_field: str,
    color_field: str,
    aggregation: str,
    x_binning: AxisBinning,
    y_binning: AxisBinning,
) -> GridView:
    """Assign every in-scope record with both axis values present to its
    unique cell and aggregate the color values per cell."""
    _check_channel(x_field, table.field_kind(x_field), "x")
    _check_channel(y_field, table.field_kind(y_field), "y")
    _check_channel(color_field, table.field_kind(color_field), "color")
    if aggregation not in AGGREGATIONS:
        raise ChannelKindError(f"unknown aggregation {aggregation!r}")

    scope_ids = np.asarray(scope_ids, dtype=np.int64)
    n_cols, n_rows = x_binning.n_bins, y_binning.n_bins
    if n_cols == 0 or n_rows == 0 or len(scope_ids) == 0:
        shape = (n_cols, n_rows)
        return GridView(
            x_binning,
            y_binning,
            np.zeros(shape, dtype=np.int64),
            np.full(shape, np.nan),
            color_field,
            aggregation,
        )

    xs = table.numeric_values(x_field)[scope_ids]
    ys = table.numeric_values(y_field)[scope_ids]
    colors = table.numeric_values(color_field)[scope_ids]

    placed = ~np.isnan(xs) & ~np.isnan(ys)
    cols = x_binning.bin_index(xs[placed])
    rows = y_binning.bin_index(ys[placed])
    in_grid = (cols >= 0) & (rows >= 0)
    ids = scope_ids[placed][in_grid]
    cols, rows = cols[in_grid], rows[in_grid]
    colors = colors[placed][in_grid]

    flat = cols * n_rows + rows
    n_cells = n_cols * n_rows
    counts = np.bincount(flat, minlength=n_cells).reshape(n_cols, n_rows)
    aggregates = _aggregate_cells(flat, colors, counts.reshape(-1), n_cells, aggregation)

    order = np.argsort(flat, kind="stable")
    flat_sorted = flat[order]
    ids_sorted = ids[order]
    starts = np.searchsorted(flat_sorted, np.arange(n_cells))
    ends = np.searchsorted(flat_sorted, np.arange(n_cells), side="right")
    cell_ids = {}
    for cell in np.nonzero(ends > starts)[0]:
        cell_ids[(cell // n_rows, cell % n_rows)] = np.sort(
            ids_sorted[starts[cell] : ends[cell]]
        )

    return GridView(
        x_binning,
        y_binning,
        counts,
        aggregates.reshape(n_cols, n_rows),
        color_field,
        aggregation,
        cell_ids,
    )


def _aggregate_cells(
    flat: np.ndarray,
    colors: np.ndarray,
    cell_counts: np.ndarray,
    n_cells: int,
    aggregation: str,
) -> np.ndarray:
    """Per-cell aggregate of the color values; cells with records but no
    color values aggregate to NaN (except count, which counts records)."""
    out = np.full(n_cells, np.nan)
    if aggregation == "count":
        nonempty = cell_counts > 0
        out[nonempty] = cell_counts[nonempty].astype(np.float64)
        return out

    has_color = ~np.isnan(colors)
    flat_c, colors_c = flat[has_color], colors[has_color]
    n_colored = np.bincount(flat_c, minlength=n_cells)
    colored = n_colored > 0
    if aggregation == "sum":
        sums = np.bincount(flat_c, weights=colors_c, minlength=n_cells)
        out[colored] = sums[colored]
    elif aggregation == "mean":
        sums = np.bincount(flat_c, weights=colors_c, minlength=n_cells)
        out[colored] = sums[colored] / n_colored[colored]
    elif aggregation == "max":
        maxes = np.full(n_cells, -np.inf)
        np.maximum.at(maxes, flat_c, colors_c)
        out[colored] = maxes[colored]
    else:  # median
        order = np.lexsort((colors_c, flat_c))
        fs, cs = flat_c[order], colors_c[order]
        starts = np.searchsorted(fs, np.arange(n_cells))
        ends = np.searchsorted(fs, np.arange(n_cells), side="right")
        for cell in np.nonzero(ends > starts)[0]:
            seg = cs[starts[cell] : ends[cell]]
            m = len(seg)
            out[cell] = seg[m // 2] if m % 2 else 0.5 * (seg[m // 2 - 1] + seg[m // 2])
    return out
