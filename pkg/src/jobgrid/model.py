"""Job-record schema, derived fields, and the immutable columnar job table.

Timestamps are integer epoch seconds, UTC. The configured timezone affects
only day-of-week derivation and datetime bucket alignment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone, tzinfo
from zoneinfo import ZoneInfo

import numpy as np

from .errors import (
    BadValue,
    MissingField,
    NonPositiveNodes,
    TemporalOrderViolation,
    UnknownField,
)

# Field kinds. Channel rules: x takes datetime or numeric, y and color take
# numeric only, categorical and facet channels take categorical only.
NUMERIC_INT = "numeric_int"
NUMERIC_FLOAT = "numeric_float"
DATETIME = "datetime"
CATEGORICAL = "categorical"

NUMERIC_KINDS = (NUMERIC_INT, NUMERIC_FLOAT)

WEEKDAY_LABELS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")

# Canonical column order: source columns in the documented ingest layout,
# derived columns appended.
SOURCE_COLUMNS = (
    "job_id",
    "user",
    "queue",
    "submit_time",
    "start_time",
    "end_time",
    "nodes_requested",
    "exit_code",
    "priority",
    "predicted_queue_wait",
)
DERIVED_COLUMNS = ("queue_wait", "hours_used", "day_of_week")
ALL_COLUMNS = SOURCE_COLUMNS + DERIVED_COLUMNS

SCHEMA: dict[str, str] = {
    "job_id": CATEGORICAL,
    "user": CATEGORICAL,
    "queue": CATEGORICAL,
    "submit_time": DATETIME,
    "start_time": DATETIME,
    "end_time": DATETIME,
    "nodes_requested": NUMERIC_INT,
    "exit_code": NUMERIC_INT,
    "priority": CATEGORICAL,
    "predicted_queue_wait": NUMERIC_FLOAT,
    "queue_wait": NUMERIC_INT,
    "hours_used": NUMERIC_FLOAT,
    "day_of_week": CATEGORICAL,
}

_OFFSET_TZ = re.compile(r"^UTC([+-])(\d{1,2})(?::(\d{2}))?$")


def parse_timezone(name: str) -> tzinfo:
    """Resolve a timezone string: 'UTC', a fixed offset like 'UTC-12' or
    'UTC+05:30', or an IANA name like 'America/Denver'."""
    if name == "UTC":
        return timezone.utc
    m = _OFFSET_TZ.match(name)
    if m:
        sign = 1 if m.group(1) == "+" else -1
        hours, minutes = int(m.group(2)), int(m.group(3) or 0)
        return timezone(sign * timedelta(hours=hours, minutes=minutes))
    try:
        return ZoneInfo(name)
    except Exception as exc:
        raise BadValue(f"unknown timezone {name!r}") from exc


def derive_day_of_week(submit_epoch: int, tz: tzinfo | str = timezone.utc) -> str:
    """Weekday label (Mon..Sun) of an epoch-seconds timestamp in the given
    timezone."""
    if isinstance(tz, str):
        tz = parse_timezone(tz)
    local = datetime.fromtimestamp(int(submit_epoch), tz)
    return WEEKDAY_LABELS[local.weekday()]


@dataclass(frozen=True)
class JobRecord:
    """One validated scheduler job. Times are epoch seconds UTC; queue_wait
    is exact integer seconds, hours_used is fractional hours."""

    job_id: str
    user: str
    queue: str
    submit_time: int
    start_time: int
    end_time: int
    nodes_requested: int
    exit_code: int
    priority: str | None
    predicted_queue_wait: float | None
    queue_wait: int
    hours_used: float
    day_of_week: str

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in ALL_COLUMNS}


_REQUIRED = (
    "job_id",
    "user",
    "queue",
    "submit_time",
    "start_time",
    "end_time",
    "nodes_requested",
    "exit_code",
)


def validate_record(raw: dict, tz: tzinfo | str = timezone.utc) -> JobRecord:
    """Validate a parsed raw record and derive queue_wait, hours_used and
    day_of_week. Raises a ValidationError subclass naming the violated rule.

    ``raw`` holds candidate values: epoch-second ints for the three
    timestamps, ints for nodes_requested/exit_code, strings for the
    categoricals, optional priority / predicted_queue_wait.
    """
    for name in _REQUIRED:
        if raw.get(name) is None:
            raise MissingField(f"missing required field {name!r}")

    submit = int(raw["submit_time"])
    start = int(raw["start_time"])
    end = int(raw["end_time"])
    if start < submit:
        raise TemporalOrderViolation("start_time precedes submit_time")
    if end < start:
        raise TemporalOrderViolation("end_time precedes start_time")

    nodes = int(raw["nodes_requested"])
    if nodes < 1:
        raise NonPositiveNodes(f"nodes_requested must be >= 1, got {nodes}")

    predicted = raw.get("predicted_queue_wait")
    return JobRecord(
        job_id=str(raw["job_id"]),
        user=str(raw["user"]),
        queue=str(raw["queue"]),
        submit_time=submit,
        start_time=start,
        end_time=end,
        nodes_requested=nodes,
        exit_code=int(raw["exit_code"]),
        priority=None if raw.get("priority") in (None, "") else str(raw["priority"]),
        predicted_queue_wait=None if predicted is None else float(predicted),
        queue_wait=start - submit,
        hours_used=(end - start) / 3600.0,
        day_of_week=derive_day_of_week(submit, tz),
    )


class Categorical:
    """A label-encoded string column: int32 codes into a label list.
    Code -1 marks a missing value."""

    __slots__ = ("codes", "labels")

    def __init__(self, codes: np.ndarray, labels: list[str]):
        self.codes = codes
        self.labels = labels

    @classmethod
    def from_values(cls, values) -> "Categorical":
        labels: list[str] = []
        index: dict[str, int] = {}
        codes = np.empty(len(values), dtype=np.int32)
        for i, v in enumerate(values):
            if v is None:
                codes[i] = -1
                continue
            code = index.get(v)
            if code is None:
                code = index[v] = len(labels)
                labels.append(v)
            codes[i] = code
        return cls(codes, labels)

    def __len__(self) -> int:
        return len(self.codes)

    def value(self, i: int) -> str | None:
        code = self.codes[i]
        return None if code < 0 else self.labels[code]

    def to_objects(self) -> np.ndarray:
        out = np.empty(len(self.codes), dtype=object)
        for i, code in enumerate(self.codes):
            out[i] = None if code < 0 else self.labels[code]
        return out

    def take(self, idx: np.ndarray) -> "Categorical":
        return Categorical(self.codes[idx], self.labels)


class JobTable:
    """Immutable columnar collection of validated job records.

    Row ids are dense 0..n-1 in ingest order and are never reassigned;
    every view and filter operation works in terms of these ids.
    """

    def __init__(self, columns: dict, timezone_name: str = "UTC"):
        self._cols = columns
        self.timezone_name = timezone_name
        self.n_rows = len(columns["submit_time"])
        self.schema = dict(SCHEMA)

    @classmethod
    def from_records(cls, records: list[JobRecord], timezone_name: str = "UTC") -> "JobTable":
        cols: dict = {}
        for name in ALL_COLUMNS:
            kind = SCHEMA[name]
            values = [getattr(r, name) for r in records]
            if kind == CATEGORICAL:
                cols[name] = Categorical.from_values(values)
            elif kind in (DATETIME, NUMERIC_INT):
                cols[name] = np.array(values, dtype=np.int64)
            else:
                cols[name] = np.array(
                    [np.nan if v is None else v for v in values], dtype=np.float64
                )
        return cls(cols, timezone_name)

    def __len__(self) -> int:
        return self.n_rows

    def field_kind(self, name: str) -> str:
        try:
            return self.schema[name]
        except KeyError:
            raise UnknownField(f"no such field {name!r}") from None

    def values(self, name: str) -> np.ndarray:
        """Numeric/datetime columns as their numpy array; categorical columns
        as an object array of labels (None where missing)."""
        col = self._column(name)
        return col.to_objects() if isinstance(col, Categorical) else col

    def numeric_values(self, name: str) -> np.ndarray:
        """Column as float64 for binning math. Datetimes come back as epoch
        seconds; categorical columns are rejected."""
        col = self._column(name)
        if isinstance(col, Categorical):
            raise UnknownField(f"field {name!r} is categorical, not numeric")
        return col.astype(np.float64)

    def categorical(self, name: str) -> Categorical:
        col = self._column(name)
        if not isinstance(col, Categorical):
            raise UnknownField(f"field {name!r} is not categorical")
        return col

    def present_mask(self, name: str) -> np.ndarray:
        """Boolean mask of rows where the column value is not missing."""
        col = self._column(name)
        if isinstance(col, Categorical):
            return col.codes >= 0
        if col.dtype == np.float64:
            return ~np.isnan(col)
        return np.ones(self.n_rows, dtype=bool)

    def record(self, row_id: int) -> JobRecord:
        get = lambda name: self._cols[name]
        pred = get("predicted_queue_wait")[row_id]
        return JobRecord(
            job_id=get("job_id").value(row_id),
            user=get("user").value(row_id),
            queue=get("queue").value(row_id),
            submit_time=int(get("submit_time")[row_id]),
            start_time=int(get("start_time")[row_id]),
            end_time=int(get("end_time")[row_id]),
            nodes_requested=int(get("nodes_requested")[row_id]),
            exit_code=int(get("exit_code")[row_id]),
            priority=get("priority").value(row_id),
            predicted_queue_wait=None if np.isnan(pred) else float(pred),
            queue_wait=int(get("queue_wait")[row_id]),
            hours_used=float(get("hours_used")[row_id]),
            day_of_week=get("day_of_week").value(row_id),
        )

    def records(self) -> list[JobRecord]:
        return [self.record(i) for i in range(self.n_rows)]

    def _column(self, name: str):
        try:
            return self._cols[name]
        except KeyError:
            raise UnknownField(f"no such field {name!r}") from None
