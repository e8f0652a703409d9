/**
 * Wire documents served by the jobgrid HTTP API. The client renders these
 * verbatim: every displayed count and extent comes from a server document.
 */

export interface AxisDocument {
    scale: "linear" | "log" | "datetime";
    unit: "hour" | "day" | "month" | null;
    edges: number[];
    has_nonpositive_bin: boolean;
    degenerate: boolean;
}

export interface GridDocument {
    x: AxisDocument;
    y: AxisDocument;
    color_field: string;
    aggregation: string;
    counts: number[][];          // [column][row]
    aggregates: (number | null)[][];
}

export interface HistogramDocument {
    orientation: "x" | "y";
    counts: number[];
    binning?: AxisDocument;      // present on the conditional-histogram endpoint
}

export interface CategoricalDocument {
    field: string;
    entries: [string, number][]; // counts nonincreasing
    truncated: boolean;
}

export interface LegendDocument {
    selected_count: number;
    color_min: number | null;
    color_max: number | null;
}

export interface UnitDocument {
    facet: string | null;
    scope_count: number;
    missing: Record<string, number>;
    grid: GridDocument;
    x_histogram: HistogramDocument;
    y_histogram: HistogramDocument;
    categorical: CategoricalDocument;
    highlighted: [number, number][];
    legend: LegendDocument;
}

export interface ViewsDocument {
    config_hash: string;
    revision: number;
    excluded_missing_facet: number;
    facets: UnitDocument[];
}

export interface MetaDocument {
    rows: number;
    schema: Record<string, string>;
    config: Record<string, string | number | boolean>;
    config_hash: string;
    facets: string[];
}

export interface MutationResponse {
    revision: number;
    selected_count: number;
}

export interface ConditionalHistogramDocument extends HistogramDocument {
    revision: number;
    facet: string;
    column: number;
}

export type Mutation =
    | { op: "set_brush"; facet: string; x_range?: [number, number] | null; y_range?: [number, number] | null }
    | { op: "clear_brush"; facet?: string | null }
    | { op: "pin" | "unpin" | "hover"; label: string }
    | { op: "clear_hover" }
    | { op: "set_encoding"; config: Record<string, string | number | boolean> };
