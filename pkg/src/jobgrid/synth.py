"""Deterministic synthetic job traces shaped like a real multi-queue
scheduler accounting log.

Queue waits are log-normal per queue (heavy right skew, so log-scale
binning is exercised), user activity follows a discrete power law (a
handful of users dominate), day-by-day submission volume follows weekday
weights and optional seasonal windows, and a shared latent size factor
couples nodes_requested to queue_wait at a configurable strength. A small
fraction of jobs starts instantly (zero wait) to keep the nonpositive bin
populated. Everything is a pure function of the scenario, seed included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from datetime import date, datetime, time, timezone

import numpy as np

from .config import parse_kv_document
from .errors import BadValue, InfeasibleScenario
from .model import Categorical, JobTable, WEEKDAY_LABELS


@dataclass(frozen=True)
class QueueSpec:
    name: str
    median_wait: float  # seconds
    sigma: float  # log-space dispersion
    share: float = 1.0  # relative record volume


@dataclass(frozen=True)
class SeasonalWindow:
    start: date  # inclusive
    end: date  # exclusive
    weight: float


@dataclass(frozen=True)
class SynthScenario:
    seed: int = 7
    record_count: int = 30_000
    queues: tuple = (
        QueueSpec("short", 300.0, 0.9, 0.45),
        QueueSpec("standard", 900.0, 1.0, 0.40),
        QueueSpec("large", 2700.0, 1.1, 0.15),
    )
    start_date: date = date(2023, 6, 1)
    end_date: date = date(2023, 12, 1)  # exclusive
    weekday_weights: tuple = (1.0,) * 7  # Mon..Sun
    user_count: int = 150
    user_skew: float = 1.1
    nodes_wait_correlation: float = 0.3
    load_wait_exponent: float = 0.5
    seasonal_windows: tuple = (
        SeasonalWindow(date(2023, 8, 1), date(2023, 8, 29), 1.8),
        SeasonalWindow(date(2023, 10, 1), date(2023, 10, 29), 0.45),
    )
    zero_wait_fraction: float = 0.02
    nodes_median: float = 4.0
    nodes_sigma: float = 0.8
    runtime_median_hours: float = 2.0
    runtime_sigma: float = 1.0
    prediction_noise_sigma: float = 0.4
    timezone_name: str = "UTC"

    def validate(self) -> None:
        if self.record_count <= 0:
            raise InfeasibleScenario("record_count must be positive")
        if self.end_date <= self.start_date:
            raise InfeasibleScenario("date range is empty")
        if not self.queues:
            raise InfeasibleScenario("at least one queue is required")
        for q in self.queues:
            if q.median_wait <= 0 or q.sigma <= 0 or q.share <= 0:
                raise InfeasibleScenario(f"queue {q.name!r} needs positive median/sigma/share")
        if len(self.weekday_weights) != 7:
            raise InfeasibleScenario("weekday_weights needs 7 entries (Mon..Sun)")
        if min(self.weekday_weights) < 0 or max(self.weekday_weights) <= 0:
            raise InfeasibleScenario("weekday_weights must be nonnegative with some load")
        if self.user_count <= 0 or self.user_skew <= 0:
            raise InfeasibleScenario("user_count and user_skew must be positive")
        if not -1.0 < self.nodes_wait_correlation < 1.0:
            raise InfeasibleScenario("nodes_wait_correlation must lie in (-1, 1)")
        if not 0.0 <= self.zero_wait_fraction < 1.0:
            raise InfeasibleScenario("zero_wait_fraction must lie in [0, 1)")
        if self.load_wait_exponent < 0:
            raise InfeasibleScenario("load_wait_exponent must be nonnegative")


def default_scenario(seed: int = 7) -> SynthScenario:
    return SynthScenario(seed=seed)


def weekend_suppressed_scenario(seed: int = 7, weekend_weight: float = 0.2) -> SynthScenario:
    """Weekday-loaded variant: Sat/Sun carry a fraction of the weekday
    volume, and through the load-wait coupling weekend waits run shorter."""
    return replace(
        default_scenario(seed),
        weekday_weights=(1.0, 1.0, 1.0, 1.0, 1.0, weekend_weight, weekend_weight),
        seasonal_windows=(),
    )


def _day_grid(scenario: SynthScenario):
    """Per-day epoch starts, weekday labels, and load weights."""
    n_days = (scenario.end_date - scenario.start_date).days
    ordinal0 = scenario.start_date.toordinal()
    days = [date.fromordinal(ordinal0 + i) for i in range(n_days)]
    epochs = np.array(
        [datetime.combine(d, time(), tzinfo=timezone.utc).timestamp() for d in days],
        dtype=np.int64,
    )
    weights = np.array([scenario.weekday_weights[d.weekday()] for d in days], dtype=np.float64)
    for window in scenario.seasonal_windows:
        for i, d in enumerate(days):
            if window.start <= d < window.end:
                weights[i] *= window.weight
    if weights.sum() <= 0:
        raise InfeasibleScenario("day weights sum to zero over the date range")
    dow = np.array([d.weekday() for d in days], dtype=np.int64)
    return epochs, dow, weights


def _shared_factor_loading(scenario: SynthScenario, day_weights: np.ndarray, day_prob: np.ndarray) -> float:
    """Loading of the shared latent factor that realizes the pooled
    nodes-wait correlation target, via moment-matched bivariate log-normal
    inversion. Raises when no loading in [-1, 1] can reach the target."""
    shares = np.array([q.share for q in scenario.queues], dtype=np.float64)
    shares /= shares.sum()
    sigmas = np.array([q.sigma for q in scenario.queues], dtype=np.float64)
    log_medians = np.log([q.median_wait for q in scenario.queues])

    sigma_bar = float(shares @ sigmas)
    sigma2_mix = float(shares @ sigmas**2)
    mu_var = float(shares @ (log_medians - shares @ log_medians) ** 2)
    log_load = scenario.load_wait_exponent * np.log(day_weights / day_weights.mean())
    load_var = float(day_prob @ (log_load - day_prob @ log_load) ** 2)

    sigma1 = math.sqrt(sigma2_mix + mu_var + load_var)
    sigma2 = scenario.nodes_sigma
    target = scenario.nodes_wait_correlation
    spread = math.sqrt(math.expm1(sigma1**2) * math.expm1(sigma2**2))
    arg = 1.0 + target * spread
    if arg <= 0:
        raise InfeasibleScenario(
            f"correlation target {target} unreachable below the log-normal floor"
        )
    rho_log = math.log(arg) / (sigma1 * sigma2)
    loading = rho_log * sigma1 / sigma_bar
    if abs(loading) > 1.0:
        raise InfeasibleScenario(
            f"correlation target {target} needs shared-factor loading "
            f"{loading:.2f}; dispersions are too wide"
        )
    return loading


def generate_synthetic(scenario: SynthScenario | None = None) -> JobTable:
    """Generate a validated JobTable for the scenario; byte-identical for
    identical scenarios."""
    scenario = scenario or default_scenario()
    scenario.validate()
    rng = np.random.Generator(np.random.PCG64(scenario.seed))
    n = scenario.record_count

    day_epochs, day_dow, day_weights = _day_grid(scenario)
    day_prob = day_weights / day_weights.sum()
    loading = _shared_factor_loading(scenario, day_weights, day_prob)
    c = math.sqrt(abs(loading))
    c_sign = 1.0 if loading >= 0 else -1.0
    mix = math.sqrt(1.0 - c * c)

    shares = np.array([q.share for q in scenario.queues], dtype=np.float64)
    queue_idx = rng.choice(len(scenario.queues), size=n, p=shares / shares.sum())
    day_idx = rng.choice(len(day_epochs), size=n, p=day_prob)
    second_of_day = rng.integers(0, 86400, size=n)
    submit = day_epochs[day_idx] + second_of_day

    shared = rng.standard_normal(n)
    wait_noise = rng.standard_normal(n)
    node_noise = rng.standard_normal(n)

    sigmas = np.array([q.sigma for q in scenario.queues])[queue_idx]
    medians = np.array([q.median_wait for q in scenario.queues])[queue_idx]
    load = (day_weights / day_weights.mean())[day_idx] ** scenario.load_wait_exponent
    wait = medians * np.exp(sigmas * (c * shared + mix * wait_noise)) * load
    wait[rng.random(n) < scenario.zero_wait_fraction] = 0.0
    queue_wait = np.rint(wait).astype(np.int64)

    log_nodes = math.log(scenario.nodes_median) + scenario.nodes_sigma * (
        c_sign * c * shared + mix * node_noise
    )
    nodes = np.maximum(1, np.rint(np.exp(log_nodes))).astype(np.int64)

    runtime_s = np.rint(
        scenario.runtime_median_hours * 3600.0
        * np.exp(scenario.runtime_sigma * rng.standard_normal(n))
    ).astype(np.int64)
    start = submit + queue_wait
    end = start + runtime_s

    user_ranks = np.arange(1, scenario.user_count + 1, dtype=np.float64)
    user_prob = user_ranks**-scenario.user_skew
    user_idx = rng.choice(scenario.user_count, size=n, p=user_prob / user_prob.sum())

    priority_idx = rng.choice(3, size=n, p=[0.80, 0.15, 0.05])
    failing = rng.random(n) >= 0.92
    failure_codes = rng.choice(np.array([1, 2, 137, 143]), size=n)
    exit_code = np.where(failing, failure_codes, 0).astype(np.int64)

    predicted = wait * np.exp(scenario.prediction_noise_sigma * rng.standard_normal(n))

    order = np.argsort(submit, kind="stable")
    columns = _assemble_columns(
        scenario,
        submit=submit[order],
        start=start[order],
        end=end[order],
        queue_wait=queue_wait[order],
        nodes=nodes[order],
        exit_code=exit_code[order],
        predicted=predicted[order],
        queue_idx=queue_idx[order],
        user_idx=user_idx[order],
        priority_idx=priority_idx[order],
        day_dow=day_dow[day_idx][order],
    )
    table = JobTable(columns, scenario.timezone_name)
    _check_median_ordering(scenario, table)
    return table


def _assemble_columns(scenario: SynthScenario, **cols) -> dict:
    n = len(cols["submit"])
    queue_labels = [q.name for q in scenario.queues]

    observed_users = np.unique(cols["user_idx"])
    user_labels = [f"u{int(k) + 1:04d}" for k in observed_users]
    user_codes = np.searchsorted(observed_users, cols["user_idx"]).astype(np.int32)

    priority_labels = ["normal", "high", "low"]
    weekday_codes = cols["day_dow"].astype(np.int32)

    return {
        "job_id": Categorical(
            np.arange(n, dtype=np.int32), [f"job-{i + 1:06d}" for i in range(n)]
        ),
        "user": Categorical(user_codes, user_labels),
        "queue": Categorical(cols["queue_idx"].astype(np.int32), queue_labels),
        "submit_time": cols["submit"].astype(np.int64),
        "start_time": cols["start"].astype(np.int64),
        "end_time": cols["end"].astype(np.int64),
        "nodes_requested": cols["nodes"],
        "exit_code": cols["exit_code"],
        "priority": Categorical(cols["priority_idx"].astype(np.int32), priority_labels),
        "predicted_queue_wait": cols["predicted"].astype(np.float64),
        "queue_wait": cols["queue_wait"],
        "hours_used": (cols["end"] - cols["start"]) / 3600.0,
        "day_of_week": Categorical(weekday_codes, list(WEEKDAY_LABELS)),
    }


def _check_median_ordering(scenario: SynthScenario, table: JobTable) -> None:
    """The realized per-queue median waits must honor the parameter
    ordering; dispersion wide enough to scramble it is an infeasible ask."""
    cat = table.categorical("queue")
    waits = table.numeric_values("queue_wait")
    empirical = {}
    for code, q in enumerate(scenario.queues):
        mask = cat.codes == code
        if mask.any():
            empirical[q.name] = float(np.median(waits[mask]))
    specs = sorted(scenario.queues, key=lambda q: q.median_wait)
    for lo, hi in zip(specs, specs[1:]):
        if lo.median_wait == hi.median_wait:
            continue
        if lo.name in empirical and hi.name in empirical:
            if empirical[lo.name] > empirical[hi.name]:
                raise InfeasibleScenario(
                    f"dispersion scrambled the requested median ordering: "
                    f"{lo.name}={empirical[lo.name]:.0f}s > {hi.name}={empirical[hi.name]:.0f}s"
                )


def scenario_from_document(text: str) -> SynthScenario:
    """Build a scenario from a key-value document mirroring the scenario
    fields; unspecified keys keep their defaults."""
    kv = parse_kv_document(text)
    base = SynthScenario()
    kwargs: dict = {}
    simple = {
        "seed": int,
        "record_count": int,
        "user_count": int,
        "user_skew": float,
        "nodes_wait_correlation": float,
        "load_wait_exponent": float,
        "zero_wait_fraction": float,
        "nodes_median": float,
        "nodes_sigma": float,
        "runtime_median_hours": float,
        "runtime_sigma": float,
        "prediction_noise_sigma": float,
        "timezone_name": str,
    }
    for key, value in kv.items():
        try:
            if key in simple:
                kwargs[key] = simple[key](value)
            elif key in ("start_date", "end_date"):
                kwargs[key] = date.fromisoformat(value)
            elif key == "weekday_weights":
                weights = tuple(float(p) for p in value.split(","))
                kwargs[key] = weights
            elif key == "queues":
                kwargs[key] = tuple(_parse_queue_spec(part) for part in value.split(","))
            elif key == "seasonal_windows":
                kwargs[key] = tuple(
                    _parse_window(part) for part in value.split(";") if part.strip()
                )
            else:
                raise BadValue(f"unknown scenario key {key!r}")
        except (ValueError, IndexError) as exc:
            raise BadValue(f"scenario key {key!r}: {exc}") from exc
    return replace(base, **kwargs)


def _parse_queue_spec(text: str) -> QueueSpec:
    parts = [p.strip() for p in text.strip().split(":")]
    if len(parts) not in (3, 4):
        raise ValueError(f"expected name:median:sigma[:share], got {text!r}")
    share = float(parts[3]) if len(parts) == 4 else 1.0
    return QueueSpec(parts[0], float(parts[1]), float(parts[2]), share)


def _parse_window(text: str) -> SeasonalWindow:
    parts = [p.strip() for p in text.strip().split(":")]
    if len(parts) != 3:
        raise ValueError(f"expected start:end:weight, got {text!r}")
    return SeasonalWindow(date.fromisoformat(parts[0]), date.fromisoformat(parts[1]), float(parts[2]))
