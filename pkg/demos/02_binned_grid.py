"""The binning engine, bottom up.

Shows scale inference, geometric edge placement, calendar-unit datetime
edges, and a summary grid built over a small table.
"""

import numpy as np

from jobgrid import (
    bin_axis,
    build_grid,
    datetime_bin_unit,
    default_scenario,
    generate_synthetic,
    infer_scale,
    log_space_edges,
)

# Scale inference: two orders of magnitude flips an axis to log.
print("infer_scale([5, 50])        ->", infer_scale(np.array([5.0, 50.0])))
print("infer_scale([1, 10000])     ->", infer_scale(np.array([1.0, 10_000.0])))
print("infer_scale([0, 3, 7])      ->", infer_scale(np.array([0.0, 3.0, 7.0])))

# Geometric edges are visually even on a log axis.
edges = log_space_edges(1.0, 100.0, 4)
print("\nlog_space_edges(1, 100, 4) ->", np.round(edges, 4).tolist())
print("consecutive ratios:         ", np.round(edges[1:] / edges[:-1], 6).tolist())

# Datetime axes bin by calendar unit chosen from the range.
print("\ndatetime_bin_unit(36h)   ->", datetime_bin_unit(36 * 3600))
print("datetime_bin_unit(183d)  ->", datetime_bin_unit(183 * 86400))
print("datetime_bin_unit(3y)    ->", datetime_bin_unit(3 * 365 * 86400))

# Waits with zeros under an inferred log scale get a dedicated bin.
waits = np.array([0.0, 0.0, 12.0, 90.0, 700.0, 40_000.0])
axis = bin_axis(waits, "numeric_int", "auto", n_bins=6)
print(f"\nwait axis: scale={axis.scale}, bins={axis.n_bins}, "
      f"nonpositive bin={axis.has_nonpositive_bin}")
print("bin assignment:", axis.bin_index(waits).tolist(), "(zeros land in bin 0)")

# A full grid over synthetic data: day columns x log wait rows,
# mean nodes_requested per cell.
table = generate_synthetic(default_scenario(seed=7))
scope = np.arange(table.n_rows)
x = bin_axis(table.numeric_values("submit_time"), "datetime", "auto", 40)
y = bin_axis(table.numeric_values("queue_wait"), "numeric_int", "auto", 20)
grid = build_grid(
    table, scope, "submit_time", "queue_wait", "nodes_requested", "mean", x, y
)
print(f"\ngrid: {grid.n_cols} day columns x {grid.n_rows} wait rows")
print(f"records placed: {grid.counts.sum()} of {table.n_rows}")
lo, hi = grid.aggregate_extents()
print(f"cell mean nodes_requested spans {lo:.1f} .. {hi:.1f}")

busiest = np.unravel_index(np.argmax(grid.counts), grid.counts.shape)
print(f"densest cell: column {busiest[0]}, row {busiest[1]}, "
      f"{grid.counts[busiest]} records")
