"""Parses scheduler accounting exports (header-bearing CSV) into a JobTable.

The documented column layout: job_id, user, queue, submit_time, start_time,
end_time, nodes_requested, exit_code, then optional priority and
predicted_queue_wait; timestamps ISO-8601. Leading '#' lines (export
provenance) are skipped. Derived columns present in the source are ignored
and recomputed from the timestamps; a disagreement beyond one second is
reported as a warning, not an error.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import (
    BadValue,
    RejectionThresholdExceeded,
    SchemaMismatch,
    UnreadableSource,
    ValidationError,
)
from .model import JobRecord, JobTable, validate_record

REQUIRED_COLUMNS = (
    "job_id",
    "user",
    "queue",
    "submit_time",
    "start_time",
    "end_time",
    "nodes_requested",
    "exit_code",
)

DEFAULT_REJECTION_LIMIT = 0.10


@dataclass
class IngestReport:
    source: str
    accepted_count: int = 0
    rejected_count: int = 0
    rejections: dict = field(default_factory=dict)  # line number -> rule name
    details: list = field(default_factory=list)  # human-readable rejection lines
    warnings: list = field(default_factory=list)


def parse_iso_timestamp(text: str) -> int:
    """ISO-8601 to epoch seconds; naive stamps are taken as UTC."""
    normalized = text.strip().replace("Z", "+00:00")
    try:
        dt = datetime.fromisoformat(normalized)
    except ValueError:
        raise BadValue(f"bad ISO-8601 timestamp {text!r}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def _parse_int(text: str, column: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise BadValue(f"column {column!r}: not an integer: {text!r}") from None


def _parse_float(text: str, column: str) -> float:
    try:
        return float(text.strip())
    except ValueError:
        raise BadValue(f"column {column!r}: not a number: {text!r}") from None


def _parse_row(header: list[str], row: list[str]) -> tuple[dict, dict]:
    """Raw candidate dict for validate_record, plus the source's own values
    for the derived columns (for the mismatch warning)."""
    cells = dict(zip(header, row))
    raw: dict = {}
    for name in ("job_id", "user", "queue"):
        value = cells.get(name, "").strip()
        raw[name] = value or None
    for name in ("submit_time", "start_time", "end_time"):
        value = cells.get(name, "").strip()
        raw[name] = parse_iso_timestamp(value) if value else None
    for name in ("nodes_requested", "exit_code"):
        value = cells.get(name, "").strip()
        raw[name] = _parse_int(value, name) if value else None
    priority = cells.get("priority", "").strip()
    raw["priority"] = priority or None
    predicted = cells.get("predicted_queue_wait", "").strip()
    raw["predicted_queue_wait"] = _parse_float(predicted, "predicted_queue_wait") if predicted else None

    source_derived = {}
    queue_wait = cells.get("queue_wait", "").strip()
    if queue_wait:
        source_derived["queue_wait"] = _parse_float(queue_wait, "queue_wait")
    hours_used = cells.get("hours_used", "").strip()
    if hours_used:
        source_derived["hours_used"] = _parse_float(hours_used, "hours_used")
    return raw, source_derived


def _open_source(source) -> tuple[str, str]:
    if hasattr(source, "read"):
        return source.read(), getattr(source, "name", "<stream>")
    path = Path(source)
    try:
        return path.read_text(encoding="utf-8"), str(path)
    except OSError as exc:
        raise UnreadableSource(f"cannot read {source}: {exc}") from exc


def ingest_table(
    source,
    format: str = "csv",
    timezone_name: str = "UTC",
    rejection_limit: float = DEFAULT_REJECTION_LIMIT,
) -> tuple[JobTable, IngestReport]:
    """Parse a scheduler accounting export into a JobTable plus a report of
    accepted/rejected rows. Row order follows the source; rejected rows are
    listed by physical line number with the violated rule."""
    if format != "csv":
        raise UnreadableSource(f"unsupported ingest format {format!r}")
    text, source_name = _open_source(source)

    lines = text.splitlines(keepends=True)
    offset = 0
    while offset < len(lines) and lines[offset].startswith("#"):
        offset += 1
    reader = csv.reader(io.StringIO("".join(lines[offset:])))

    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise SchemaMismatch("empty source: no header row") from None
    missing_columns = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing_columns:
        raise SchemaMismatch(f"required columns missing: {', '.join(missing_columns)}")

    report = IngestReport(source=source_name)
    records: list[JobRecord] = []
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        line_num = offset + reader.line_num
        try:
            raw, source_derived = _parse_row(header, row)
            record = validate_record(raw, timezone_name)
        except ValidationError as exc:
            report.rejected_count += 1
            report.rejections[line_num] = exc.rule
            report.details.append(f"line {line_num}: {exc.rule}: {exc}")
            continue
        for name, derived in (("queue_wait", record.queue_wait), ("hours_used", record.hours_used)):
            stated = source_derived.get(name)
            if stated is None:
                continue
            drift = abs(stated - derived) * (3600.0 if name == "hours_used" else 1.0)
            if drift > 1.0:
                report.warnings.append(
                    f"line {line_num}: {name} in source ({stated}) disagrees with "
                    f"timestamps ({derived}); recomputed value kept"
                )
        records.append(record)
        report.accepted_count += 1

    total = report.accepted_count + report.rejected_count
    if total > 0 and report.rejected_count / total > rejection_limit:
        raise RejectionThresholdExceeded(
            f"{report.rejected_count}/{total} rows rejected "
            f"(limit {rejection_limit:.0%}); first: {report.details[0]}"
        )
    return JobTable.from_records(records, timezone_name), report
