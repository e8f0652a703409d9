"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v` (the summary lines bypass
pytest's capture so they always appear).
"""

from __future__ import annotations

import io

import time
import numpy as np
from scipy import stats

from jobgrid.binning import log_space_edges
from jobgrid.config import resolve_config
from jobgrid.export import retrieve_selected_records, to_csv_text
from jobgrid.ingest import ingest_table
from jobgrid.model import SCHEMA
from jobgrid.selection import (
    Mutation,
    compute_selected_ids,
    new_session,
    update_state,
)
from jobgrid.synth import default_scenario, generate_synthetic, weekend_suppressed_scenario
from jobgrid.views import (
    compose_unit,
    conditional_y_histogram,
    facet_views,
    histogram_quantile,
    top_categories,
)

from conftest import make_random_table
from oracles import (
    brute_conditional_histogram,
    brute_grid,
    brute_selection,
    brute_top_k,
)

CFG = resolve_config(None, SCHEMA)


def report(criterion: str, passed: bool, detail: str) -> None:
    from conftest import ACCEPTANCE_LINES

    status = "PASS" if passed else "FAIL"
    line = f"{criterion} {status} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def _random_session(rng, table, config, max_mutations=6):
    from test_selection import _random_mutation

    session = new_session(table, config, stamp="2024-03-03T00:00:00Z")
    for _ in range(int(rng.integers(1, max_mutations))):
        session = update_state(
            session, _random_mutation(rng, table, config), stamp="2024-03-03T00:00:01Z"
        )
    return session


def test_p1_conservation_suite():
    """P1: grid/histogram totals equal the in-scope row count, exactly,
    for 200 seeded random tables of 1e2..3e4 rows, in under 60 s."""
    rng = np.random.Generator(np.random.PCG64(101))
    configs = [
        CFG,
        resolve_config({"x_field": "queue_wait", "x_scale": "log"}, SCHEMA),
        resolve_config({"y_field": "hours_used", "y_scale": "linear"}, SCHEMA),
        resolve_config({"x_field": "nodes_requested", "y_field": "queue_wait"}, SCHEMA),
    ]
    started = time.perf_counter()
    checked = 0
    for trial in range(200):
        n = int(rng.integers(100, 30_001))
        table = make_random_table(trial, n=n, with_missing=False)
        config = configs[trial % len(configs)]
        session = None
        if trial % 3 == 0:
            labels = table.categorical(config.categorical_field).labels
            session = new_session(table, config)
            session = update_state(
                session, Mutation(op="pin", label=str(rng.choice(labels)))
            )
        for bundle in facet_views(table, config, session):
            # independent scope count from the raw columns
            mask = np.ones(table.n_rows, dtype=bool)
            cat = table.categorical(config.facet_field)
            mask &= cat.codes == cat.labels.index(bundle.facet_label)
            if session is not None:
                ucat = table.categorical(config.categorical_field)
                keep = {ucat.labels.index(l) for l in session.filter.active_labels()}
                mask &= np.isin(ucat.codes, list(keep))
            expected = int(mask.sum())
            assert bundle.grid.counts.sum() == expected
            assert bundle.x_histogram.total == expected
            assert bundle.y_histogram.total == expected
            checked += 1
    elapsed = time.perf_counter() - started
    passed = elapsed < 60.0
    report("P1", passed, f"{checked} bundles over 200 tables conserved in {elapsed:.1f}s")
    assert passed


def test_p2_log_edge_geometry():
    """P2: for n in [1,256] x 100 random ranges, edge ratios constant to
    1e-9 relative and endpoints exact to 1e-12 relative."""
    rng = np.random.Generator(np.random.PCG64(202))
    pairs = []
    for _ in range(100):
        lo = 10.0 ** rng.uniform(-6, 5)
        hi = lo * 10.0 ** rng.uniform(0.05, 8)
        pairs.append((lo, hi))
    worst_ratio_dev = 0.0
    worst_endpoint_dev = 0.0
    for n in range(1, 257):
        for lo, hi in pairs:
            edges = log_space_edges(lo, hi, n)
            worst_endpoint_dev = max(
                worst_endpoint_dev,
                abs(edges[0] - lo) / lo,
                abs(edges[-1] - hi) / hi,
            )
            if n > 1:
                ratios = edges[1:] / edges[:-1]
                worst_ratio_dev = max(
                    worst_ratio_dev, float(np.abs(ratios / ratios[0] - 1).max())
                )
    passed = worst_ratio_dev <= 1e-9 and worst_endpoint_dev <= 1e-12
    report(
        "P2",
        passed,
        f"25600 edge sets: ratio dev {worst_ratio_dev:.2e}, endpoint dev {worst_endpoint_dev:.2e}",
    )
    assert passed


def test_p3_oracle_equivalence():
    """P3: grid assignment, top-10 categorical, filter/brush selection, and
    conditional histograms match brute-force scans on 200 instances."""
    rng = np.random.Generator(np.random.PCG64(303))
    config = resolve_config({"x_bins": 12, "y_bins": 8}, SCHEMA)
    for trial in range(200):
        n = int(rng.integers(30, 1001))
        table = make_random_table(10_000 + trial, n=n, with_missing=False)
        session = _random_session(rng, table, config)
        bundle = compose_unit(table, config, session)
        grid = bundle.grid

        xs = table.numeric_values(config.x_field)
        ys = table.numeric_values(config.y_field)
        colors = table.numeric_values(config.color_field)
        scope = set(bundle.scope_ids.tolist())
        rows = [
            (i, xs[i], ys[i], colors[i]) for i in range(table.n_rows) if i in scope
        ]

        oracle_cells = brute_grid(
            rows, list(grid.x_binning.edges), list(grid.y_binning.edges),
            grid.x_binning.has_nonpositive_bin, grid.y_binning.has_nonpositive_bin,
        )
        assert set(oracle_cells) == set(grid.cell_ids)
        for cell, (ids, _) in oracle_cells.items():
            assert grid.cell_ids[cell].tolist() == ids

        labels = [table.record(i).user for i in sorted(scope)]
        expected_top, truncated = brute_top_k(labels, 10)
        view = top_categories(table, bundle.scope_ids, "user")
        assert [(l, c) for l, c in view.entries] == expected_top
        assert view.truncated == truncated

        expected_sel = brute_selection(
            [(i, table.record(i)) for i in range(table.n_rows)],
            config.facet_field, config.categorical_field, config.x_field, config.y_field,
            pins=set(session.filter.pinned_labels),
            hover=session.filter.hover_label,
            brushes={f: (b.x_range, b.y_range) for f, b in session.brushes.items()},
        )
        assert session.selected_ids.tolist() == expected_sel

        for col in rng.integers(0, grid.n_cols, size=2):
            hist = conditional_y_histogram(grid, int(col))
            expected_hist = brute_conditional_histogram(
                rows, list(grid.x_binning.edges), list(grid.y_binning.edges),
                grid.x_binning.has_nonpositive_bin, grid.y_binning.has_nonpositive_bin,
                int(col),
            )
            assert hist.counts.tolist() == expected_hist
    report("P3", True, "200 instances: grids, top-10, selections, conditionals all exact")


def test_p4_export_round_trip():
    """P4: export->ingest reproduces every selected record exactly on 50
    random selections; re-export is byte-stable."""
    rng = np.random.Generator(np.random.PCG64(404))
    for trial in range(50):
        table = make_random_table(20_000 + trial, n=int(rng.integers(50, 600)))
        session = _random_session(rng, table, CFG)
        document = retrieve_selected_records(session)
        text = to_csv_text(document)
        assert text == to_csv_text(retrieve_selected_records(session))  # byte-stable
        reread, ingest_report = ingest_table(io.StringIO(text))
        assert ingest_report.rejected_count == 0
        assert reread.records() == list(document.rows)
    report("P4", True, "50 selections round-tripped field-identically, byte-stable")


def test_p5_mutation_sequence_idempotence():
    """P5: after random sequences of <=50 mutations, incremental
    selected_ids equal a from-scratch recomputation, exactly."""
    from test_selection import _random_mutation

    rng = np.random.Generator(np.random.PCG64(505))
    for trial in range(30):
        table = make_random_table(30_000 + trial, n=int(rng.integers(50, 2000)))
        session = new_session(table, CFG)
        for _ in range(int(rng.integers(1, 51))):
            session = update_state(session, _random_mutation(rng, table, CFG))
            scratch = compute_selected_ids(
                table, session.config, session.filter, session.brushes
            )
            assert np.array_equal(session.selected_ids, scratch)
    report("P5", True, "30 sequences of <=50 mutations, incremental == scratch")


def test_p6_identify_shortest_wait_queue():
    """P6: on the default 30k three-queue scenario, per-queue y-histogram
    medians computed from the ViewBundles identify the short queue."""
    started = time.perf_counter()
    table = generate_synthetic(default_scenario(7))
    assert table.n_rows == 30_000
    bundles = facet_views(table, CFG)
    assert len(bundles) == 3
    medians = {
        b.facet_label: histogram_quantile(
            b.y_histogram.binning, b.y_histogram.counts, 0.5
        )
        for b in bundles
    }
    elapsed = time.perf_counter() - started
    winner = min(medians, key=medians.get)
    again = {
        b.facet_label: histogram_quantile(b.y_histogram.binning, b.y_histogram.counts, 0.5)
        for b in facet_views(generate_synthetic(default_scenario(7)), CFG)
    }
    passed = winner == "short" and elapsed < 5.0 and again == medians
    report(
        "P6",
        passed,
        f"histogram medians {', '.join(f'{q}={m:.0f}s' for q, m in medians.items())} "
        f"in {elapsed:.2f}s",
    )
    assert passed


def test_p7_nodes_wait_correlation_reading():
    """P7: with a 0.3 correlation target, the Spearman correlation between
    y-row index and the mean nodes_requested cell aggregate is positive in
    at least 19 of 20 seeds."""
    positives = 0
    for seed in range(1, 21):
        table = generate_synthetic(default_scenario(seed))
        pairs = []
        for bundle in facet_views(table, CFG):
            grid = bundle.grid
            for (col, row), _ in grid.cell_ids.items():
                value = grid.aggregates[col, row]
                if not np.isnan(value):
                    pairs.append((row, value))
        rows, values = zip(*pairs)
        rho = stats.spearmanr(rows, values).statistic
        positives += int(rho > 0)
    passed = positives >= 19
    report("P7", passed, f"positive Spearman sign in {positives}/20 seeds")
    assert passed


def test_p8_usage_peak_and_trough():
    """P8: the x-histogram day counts peak inside the injected late-summer
    window and bottom out inside the early-fall trough window."""
    scenario = default_scenario(7)
    table = generate_synthetic(scenario)
    bundle = compose_unit(table, CFG)  # one unit over the whole table
    assert bundle.grid.x_binning.unit == "day"
    counts = bundle.x_histogram.counts
    edges = bundle.x_histogram.binning.edges

    def day_of(idx: int):
        from datetime import datetime, timezone

        return datetime.fromtimestamp(edges[idx], timezone.utc).date()

    peak_day = day_of(int(np.argmax(counts)))
    trough_day = day_of(int(np.argmin(counts)))
    peak_window, trough_window = scenario.seasonal_windows
    peak_ok = peak_window.start <= peak_day < peak_window.end
    trough_ok = trough_window.start <= trough_day < trough_window.end
    passed = peak_ok and trough_ok
    report("P8", passed, f"argmax day {peak_day}, argmin day {trough_day}")
    assert passed


def test_p9_best_day_of_week():
    """P9: on a weekend-suppressed scenario with day_of_week configured,
    Sat and Sun have the two lowest counts and pinning the weekend keeps
    the wait-time histogram median at or below the unpinned median."""
    table = generate_synthetic(weekend_suppressed_scenario(7))
    config = resolve_config({"categorical_field": "day_of_week"}, SCHEMA)

    bundles = {b.facet_label: b for b in facet_views(table, config)}
    standard = bundles["standard"]
    by_count = [label for label, _ in standard.categorical.entries]
    lowest_two = set(by_count[-2:])
    weekend_lowest = lowest_two == {"Sat", "Sun"}

    unpinned_median = histogram_quantile(
        standard.y_histogram.binning, standard.y_histogram.counts, 0.5
    )
    session = new_session(table, config)
    session = update_state(session, Mutation(op="pin", label="Sat"))
    session = update_state(session, Mutation(op="pin", label="Sun"))
    pinned = {b.facet_label: b for b in facet_views(table, config, session)}["standard"]
    pinned_median = histogram_quantile(
        pinned.y_histogram.binning, pinned.y_histogram.counts, 0.5
    )
    passed = weekend_lowest and pinned_median <= unpinned_median
    report(
        "P9",
        passed,
        f"lowest counts {sorted(lowest_two)}, median pinned {pinned_median:.0f}s "
        f"<= unpinned {unpinned_median:.0f}s",
    )
    assert passed


def test_p10_performance():
    """P10: composing all facet bundles for the 30k default scenario stays
    under 250 ms and a mutation round-trip under 100 ms (best of 3)."""
    table = generate_synthetic(default_scenario(7))
    facet_views(table, CFG)  # warm numpy caches

    compose_times = []
    for _ in range(3):
        t0 = time.perf_counter()
        facet_views(table, CFG)
        compose_times.append(time.perf_counter() - t0)

    session = new_session(table, CFG)
    roundtrip_times = []
    for i in range(3):
        t0 = time.perf_counter()
        session = update_state(
            session,
            Mutation(op="set_brush", facet="standard", y_range=(100.0 + i, 5000.0)),
        )
        facet_views(table, CFG, session)
        roundtrip_times.append(time.perf_counter() - t0)

    compose_ms = min(compose_times) * 1000
    roundtrip_ms = min(roundtrip_times) * 1000
    passed = compose_ms < 250 and roundtrip_ms < 100
    report("P10", passed, f"compose {compose_ms:.0f} ms, mutation round-trip {roundtrip_ms:.0f} ms")
    assert passed
