from __future__ import annotations

from dataclasses import replace
from datetime import date

import numpy as np
import pytest

from jobgrid.errors import BadValue, InfeasibleScenario
from jobgrid.export import document_for_table, to_csv_text
from jobgrid.model import validate_record
from jobgrid.synth import (
    QueueSpec,
    default_scenario,
    generate_synthetic,
    scenario_from_document,
    weekend_suppressed_scenario,
)

from oracles import weekday_by_arithmetic


def small(seed=1, n=3000, **overrides):
    return replace(default_scenario(seed), record_count=n, **overrides)


class TestDeterminism:
    def test_same_seed_is_byte_identical(self):
        a = generate_synthetic(small(seed=11))
        b = generate_synthetic(small(seed=11))
        assert to_csv_text(document_for_table(a)) == to_csv_text(document_for_table(b))

    def test_different_seeds_differ(self):
        a = generate_synthetic(small(seed=1))
        b = generate_synthetic(small(seed=2))
        assert to_csv_text(document_for_table(a)) != to_csv_text(document_for_table(b))


class TestDefaultScenarioShape:
    def test_study_sized_three_queue_trace(self):
        table = generate_synthetic(default_scenario(7))
        assert table.n_rows == 30_000
        queues = table.categorical("queue").labels
        assert len(queues) == 3
        assert "short" in queues and "standard" in queues

    def test_dates_span_june_to_december(self):
        table = generate_synthetic(small(seed=4, n=8000))
        submit = table.numeric_values("submit_time")
        assert submit.min() >= 1685577600  # 2023-06-01
        assert submit.max() < 1701388800  # 2023-12-01

    def test_every_record_validates(self):
        table = generate_synthetic(small(seed=3, n=800))
        for record in table.records():
            revalidated = validate_record(
                {k: v for k, v in record.as_dict().items()}, "UTC"
            )
            assert revalidated == record

    def test_submit_sorted_with_dense_ids(self):
        table = generate_synthetic(small(seed=5, n=1000))
        submit = table.numeric_values("submit_time")
        assert (np.diff(submit) >= 0).all()
        assert table.record(0).job_id == "job-000001"


class TestStatisticalTargets:
    def test_median_waits_ordered_as_specified(self):
        table = generate_synthetic(default_scenario(7))
        cat = table.categorical("queue")
        waits = table.numeric_values("queue_wait")
        medians = {
            q: float(np.median(waits[cat.codes == cat.labels.index(q)]))
            for q in ("short", "standard", "large")
        }
        assert medians["short"] < medians["standard"] < medians["large"]

    @pytest.mark.parametrize("seed", [1, 5, 9, 13, 17])
    def test_nodes_wait_correlation_within_band(self, seed):
        table = generate_synthetic(default_scenario(seed))
        waits = table.numeric_values("queue_wait")
        nodes = table.numeric_values("nodes_requested")
        corr = float(np.corrcoef(nodes, waits)[0, 1])
        assert abs(corr - 0.3) <= 0.1

    def test_weekend_weights_shrink_weekend_counts(self):
        table = generate_synthetic(
            replace(weekend_suppressed_scenario(2), record_count=12_000)
        )
        submit = table.numeric_values("submit_time")
        counts = {}
        for epoch in submit:  # brute-force group-by on raw epochs
            day = weekday_by_arithmetic(int(epoch))
            counts[day] = counts.get(day, 0) + 1
        weekend = {counts.get("Sat", 0), counts.get("Sun", 0)}
        weekdays = [counts[d] for d in ("Mon", "Tue", "Wed", "Thu", "Fri")]
        assert max(weekend) < min(weekdays)

    def test_user_activity_is_heavy_tailed(self):
        table = generate_synthetic(default_scenario(7))
        cat = table.categorical("user")
        counts = np.sort(np.bincount(cat.codes[cat.codes >= 0]))[::-1]
        top10_share = counts[:10].sum() / counts.sum()
        assert top10_share > 0.25
        assert counts[0] > 4 * counts[49]

    def test_zero_waits_present_for_log_binning(self):
        table = generate_synthetic(default_scenario(7))
        waits = table.numeric_values("queue_wait")
        assert (waits == 0).sum() > 100
        positive = waits[waits > 0]
        assert positive.max() / positive.min() >= 100  # log path exercised


class TestInfeasibility:
    def test_overstrong_correlation_target(self):
        with pytest.raises(InfeasibleScenario):
            generate_synthetic(small(nodes_wait_correlation=0.95))

    def test_invalid_invariants(self):
        with pytest.raises(InfeasibleScenario):
            generate_synthetic(small(n=0))
        with pytest.raises(InfeasibleScenario):
            generate_synthetic(small(end_date=date(2023, 5, 1)))
        with pytest.raises(InfeasibleScenario):
            generate_synthetic(
                small(queues=(QueueSpec("short", -5.0, 1.0, 1.0),))
            )
        with pytest.raises(InfeasibleScenario):
            generate_synthetic(small(user_skew=0.0))


class TestScenarioDocument:
    def test_round_trip_keys(self):
        text = """
            seed = 42
            record_count = 500
            start_date = 2024-01-01
            end_date = 2024-03-01
            queues = fast:60:0.8:2, slow:600:1.0:1
            weekday_weights = 1,1,1,1,1,0.5,0.5
            user_count = 20
            user_skew = 1.5
            nodes_wait_correlation = 0.2
            seasonal_windows = 2024-02-01:2024-02-15:2.0
        """
        scenario = scenario_from_document(text)
        assert scenario.seed == 42
        assert scenario.record_count == 500
        assert scenario.queues[0] == QueueSpec("fast", 60.0, 0.8, 2.0)
        assert scenario.weekday_weights[5] == 0.5
        assert scenario.seasonal_windows[0].weight == 2.0
        table = generate_synthetic(scenario)
        assert table.n_rows == 500

    def test_unknown_key_rejected(self):
        with pytest.raises(BadValue):
            scenario_from_document("warp_factor = 9\n")

    def test_bad_queue_spec_rejected(self):
        with pytest.raises(BadValue):
            scenario_from_document("queues = fast:sixty\n")
