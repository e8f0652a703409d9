"""Binned summary views, linked filtering, and selection export for HPC
scheduler job traces."""

from .binning import (
    AxisBinning,
    GridView,
    bin_axis,
    build_grid,
    datetime_bin_unit,
    infer_scale,
    log_space_edges,
)
from .config import EncodingConfig, config_hash, resolve_config
from .export import ExportDocument, retrieve_selected_records, write_export
from .ingest import IngestReport, ingest_table
from .model import JobRecord, JobTable, derive_day_of_week, validate_record
from .selection import (
    BrushState,
    FilterState,
    Mutation,
    SessionState,
    brush_predicate,
    compute_selected_ids,
    filter_predicate,
    new_session,
    selected_count,
    update_state,
)
from .synth import QueueSpec, SynthScenario, default_scenario, generate_synthetic
from .views import (
    CategoricalView,
    HistogramView,
    ViewBundle,
    compose_unit,
    conditional_y_histogram,
    facet_views,
    histogram_quantile,
    top_categories,
)

__version__ = "0.1.0"

__all__ = [
    "AxisBinning",
    "BrushState",
    "CategoricalView",
    "EncodingConfig",
    "ExportDocument",
    "FilterState",
    "GridView",
    "HistogramView",
    "IngestReport",
    "JobRecord",
    "JobTable",
    "Mutation",
    "QueueSpec",
    "SessionState",
    "SynthScenario",
    "ViewBundle",
    "bin_axis",
    "brush_predicate",
    "build_grid",
    "compose_unit",
    "compute_selected_ids",
    "conditional_y_histogram",
    "config_hash",
    "datetime_bin_unit",
    "default_scenario",
    "derive_day_of_week",
    "facet_views",
    "filter_predicate",
    "generate_synthetic",
    "histogram_quantile",
    "infer_scale",
    "ingest_table",
    "log_space_edges",
    "new_session",
    "resolve_config",
    "retrieve_selected_records",
    "selected_count",
    "top_categories",
    "update_state",
    "validate_record",
    "write_export",
]
