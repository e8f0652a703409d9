"""Materializes the selected-record set as a table for downstream scripting.

Each retrieval reflects the session's current revision; a provenance block
(config hash, filter/brush description, revision, timestamp) rides along so
a script can tell which selection it is holding. CSV output round-trips
through ingestion field-for-field.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .config import config_hash
from .errors import IoError
from .model import ALL_COLUMNS, JobRecord
from .selection import SessionState

EXPORT_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class ExportDocument:
    columns: tuple
    rows: tuple  # JobRecords, ascending submit_time, ties by row id
    provenance: dict


def _describe_filters(session: SessionState) -> str:
    pins = "|".join(sorted(session.filter.pinned_labels)) or "-"
    hover = session.filter.hover_label or "-"
    return f"pins={pins};hover={hover}"


def _describe_brushes(session: SessionState) -> str:
    parts = []
    for facet, brush in sorted(session.brushes.items(), key=lambda kv: str(kv[0])):
        if brush.empty:
            continue
        bits = [str(facet)]
        if brush.x_range is not None:
            bits.append(f"x=[{brush.x_range[0]!r},{brush.x_range[1]!r}]")
        if brush.y_range is not None:
            bits.append(f"y=[{brush.y_range[0]!r},{brush.y_range[1]!r}]")
        parts.append(":".join(bits))
    return ";".join(parts) or "-"


def retrieve_selected_records(session: SessionState) -> ExportDocument:
    """The session's current selection as an export document (empty
    selection still yields the header and provenance)."""
    table = session.table
    ids = session.selected_ids
    if len(ids) > 0:
        submit = table.numeric_values("submit_time")[ids]
        ids = ids[np.lexsort((ids, submit))]
    return ExportDocument(
        columns=ALL_COLUMNS,
        rows=tuple(table.record(int(i)) for i in ids),
        provenance={
            "config_hash": config_hash(session.config),
            "filters": _describe_filters(session),
            "brushes": _describe_brushes(session),
            "revision": session.revision,
            "timestamp": session.stamp,
            "timezone": table.timezone_name,
        },
    )


def document_for_table(table, provenance: dict | None = None) -> ExportDocument:
    """A whole table as an export document, rows in id order (so an
    ingest of the output reproduces the table exactly)."""
    return ExportDocument(
        columns=ALL_COLUMNS,
        rows=tuple(table.record(i) for i in range(table.n_rows)),
        provenance=provenance if provenance is not None else {"timezone": table.timezone_name},
    )


def format_timestamp(epoch: int) -> str:
    return datetime.fromtimestamp(int(epoch), timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _csv_cell(record: JobRecord, column: str) -> str:
    value = getattr(record, column)
    if value is None:
        return ""
    if column in ("submit_time", "start_time", "end_time"):
        return format_timestamp(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_csv_text(document: ExportDocument) -> str:
    buf = io.StringIO()
    for key, value in document.provenance.items():
        buf.write(f"# {key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(document.columns)
    for record in document.rows:
        writer.writerow([_csv_cell(record, c) for c in document.columns])
    return buf.getvalue()


def _json_cell(record: JobRecord, column: str):
    value = getattr(record, column)
    if value is not None and column in ("submit_time", "start_time", "end_time"):
        return format_timestamp(value)
    return value


def to_json_text(document: ExportDocument) -> str:
    """JSON rows: a provenance object on the first line, then one object
    per selected record, keys = column names."""
    lines = [json.dumps({"provenance": document.provenance}, ensure_ascii=False)]
    for record in document.rows:
        lines.append(
            json.dumps(
                {c: _json_cell(record, c) for c in document.columns}, ensure_ascii=False
            )
        )
    return "\n".join(lines) + "\n"


def export_text(document: ExportDocument, format: str = "csv") -> str:
    if format == "csv":
        return to_csv_text(document)
    if format == "json":
        return to_json_text(document)
    raise IoError(f"unknown export format {format!r}; expected one of {EXPORT_FORMATS}")


def write_export(document: ExportDocument, destination, format: str = "csv") -> str:
    """Write the document to a path or text stream; returns the text written
    (bit-stable for identical documents)."""
    text = export_text(document, format)
    if hasattr(destination, "write"):
        destination.write(text)
        return text
    try:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {destination}: {exc}") from exc
    return text
