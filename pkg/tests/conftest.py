from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from jobgrid.model import Categorical, JobRecord, JobTable, validate_record

GOLDEN_DIR = Path(__file__).parent / "golden"

# Filled by the acceptance suite; echoed after the run so the per-criterion
# verdict lines always reach the terminal.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

# Epochs for the hand-checked five-record fixture. 2023-06-05 is a Monday.
T0 = 1685923200  # 2023-06-05T00:00:00Z


def fixture_raw_records() -> list[dict]:
    hour = 3600
    return [
        dict(job_id="a1", user="alice", queue="alpha", submit_time=T0,
             start_time=T0, end_time=T0 + hour, nodes_requested=1, exit_code=0,
             priority=None, predicted_queue_wait=5.0),
        dict(job_id="b1", user="bob", queue="alpha", submit_time=T0 + 6 * hour,
             start_time=T0 + 6 * hour + 60, end_time=T0 + 8 * hour + 60,
             nodes_requested=2, exit_code=0, priority="normal",
             predicted_queue_wait=80.0),
        dict(job_id="a2", user="alice", queue="alpha", submit_time=T0 + 36 * hour,
             start_time=T0 + 36 * hour + 600, end_time=T0 + 36 * hour + 2400,
             nodes_requested=4, exit_code=1, priority="high",
             predicted_queue_wait=400.0),
        dict(job_id="c1", user="carol", queue="beta", submit_time=T0 + 48 * hour,
             start_time=T0 + 48 * hour + 6000, end_time=T0 + 48 * hour + 6900,
             nodes_requested=8, exit_code=0, priority="normal",
             predicted_queue_wait=None),
        dict(job_id="a3", user="alice", queue="beta", submit_time=T0 + 108 * hour,
             start_time=T0 + 108 * hour + 60000, end_time=T0 + 108 * hour + 60300,
             nodes_requested=16, exit_code=0, priority="low",
             predicted_queue_wait=70000.0),
    ]


@pytest.fixture
def five_records() -> list[JobRecord]:
    return [validate_record(raw) for raw in fixture_raw_records()]


@pytest.fixture
def five_table(five_records) -> JobTable:
    return JobTable.from_records(five_records)


def make_random_table(seed: int, n: int, n_queues: int = 3, n_users: int = 12,
                      with_missing: bool = True) -> JobTable:
    """Fast random JobTable for oracle and conservation tests. The bound
    default channels (submit_time, queue_wait, nodes_requested) are always
    present; the optional fields carry missing values when asked."""
    rng = np.random.Generator(np.random.PCG64(seed))
    submit = rng.integers(T0, T0 + 180 * 86400, size=n)
    wait = np.where(
        rng.random(n) < 0.05,
        0,
        np.rint(np.exp(rng.normal(5.5, 1.6, size=n))).astype(np.int64),
    ).astype(np.int64)
    runtime = rng.integers(60, 6 * 3600, size=n)
    start = submit + wait
    end = start + runtime

    queues = [f"q{i}" for i in range(n_queues)]
    users = [f"user{i:02d}" for i in range(n_users)]
    queue_vals = [queues[i] for i in rng.integers(0, n_queues, size=n)]
    user_vals = [users[i] for i in rng.integers(0, n_users, size=n)]
    priority_vals = [
        None if (with_missing and p < 0.2) else ("high" if p > 0.8 else "normal")
        for p in rng.random(n)
    ]
    predicted = wait * np.exp(rng.normal(0, 0.4, size=n))
    if with_missing:
        predicted[rng.random(n) < 0.15] = np.nan

    columns = {
        "job_id": Categorical(np.arange(n, dtype=np.int32), [f"j{i:06d}" for i in range(n)]),
        "user": Categorical.from_values(user_vals),
        "queue": Categorical.from_values(queue_vals),
        "submit_time": submit.astype(np.int64),
        "start_time": start.astype(np.int64),
        "end_time": end.astype(np.int64),
        "nodes_requested": rng.integers(1, 65, size=n).astype(np.int64),
        "exit_code": np.where(rng.random(n) < 0.9, 0, 137).astype(np.int64),
        "priority": Categorical.from_values(priority_vals),
        "predicted_queue_wait": predicted.astype(np.float64),
        "queue_wait": wait,
        "hours_used": runtime / 3600.0,
        "day_of_week": Categorical.from_values(
            [("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")[(int(e) // 86400 + 3) % 7]
             for e in submit]
        ),
    }
    return JobTable(columns)
