/**
 * Client-side session logic: view-model validation, brush gestures,
 * category gestures, the monotone revision guard, and the hover debouncer.
 * Displayed numbers always come from server documents; this module only
 * decides which document to show and which mutation to post.
 */

import { bandGeometry, binRangeToData, snapDragToBins } from "./scales.js";
import type {
    AxisDocument,
    Mutation,
    UnitDocument,
    ViewsDocument,
} from "./types.js";

export interface UnitViewModel {
    doc: UnitDocument;
    degraded: boolean;       // malformed document: render a banner instead
    hoveredColumn: number | null;
    conditionalCounts: number[] | null; // served conditional y histogram
}

function isFiniteArray(xs: unknown): xs is number[] {
    return Array.isArray(xs) && xs.every((x) => typeof x === "number" && Number.isFinite(x));
}

/** Structural check; a failure degrades the unit, it never throws. */
export function validateUnit(doc: UnitDocument): boolean {
    try {
        const counts = doc.grid.counts;
        if (!Array.isArray(counts)) return false;
        if (!isFiniteArray(doc.x_histogram.counts)) return false;
        if (!isFiniteArray(doc.y_histogram.counts)) return false;
        if (!Array.isArray(doc.categorical.entries)) return false;
        if (typeof doc.legend.selected_count !== "number") return false;
        if (!isFiniteArray(doc.grid.x.edges) || !isFiniteArray(doc.grid.y.edges)) return false;
        return true;
    } catch {
        return false;
    }
}

export function toViewModels(views: ViewsDocument): UnitViewModel[] {
    return views.facets.map((doc) => ({
        doc,
        degraded: !validateUnit(doc),
        hoveredColumn: null,
        conditionalCounts: null,
    }));
}

/**
 * Snap a pixel drag over a histogram to bin boundaries and build the brush
 * mutation. A zero-width click clears the facet's brush; drags outside the
 * plot clamp to the axis extent. Returns null for facet-less units.
 */
export function brushMutation(
    facet: string | null,
    axis: AxisDocument,
    orientation: "x" | "y",
    bins: number,
    plotLo: number,
    plotHi: number,
    dragStart: number,
    dragEnd: number,
): Mutation | null {
    if (facet === null) return null;
    const geometry = bandGeometry(bins, plotLo, plotHi, orientation === "y");
    const snapped = snapDragToBins(geometry, dragStart, dragEnd);
    if (snapped === null) {
        return { op: "clear_brush", facet };
    }
    const range = binRangeToData(axis, snapped.lo, snapped.hi);
    return orientation === "x"
        ? { op: "set_brush", facet, x_range: range, y_range: null }
        : { op: "set_brush", facet, x_range: null, y_range: range };
}

/** Hover posts a transient filter; click toggles the pin. */
export function categoryMutation(
    label: string,
    gesture: "hover" | "leave" | "click",
    pinned: Set<string>,
): Mutation {
    if (gesture === "hover") return { op: "hover", label };
    if (gesture === "leave") return { op: "clear_hover" };
    return pinned.has(label) ? { op: "unpin", label } : { op: "pin", label };
}

/**
 * Monotone revision guard: responses older than the newest one already
 * applied are discarded, so the rendered revision never decreases.
 */
export class RevisionGuard {
    private latest = -1;

    shouldApply(revision: number): boolean {
        if (revision < this.latest) return false;
        this.latest = revision;
        return true;
    }

    get current(): number {
        return this.latest;
    }
}

/**
 * Trailing-edge debouncer with last-write-wins: rapid hover traffic
 * collapses to the final gesture after the quiet period.
 */
export function debounce<A extends unknown[]>(
    fn: (...args: A) => void,
    waitMs = 150,
    timers: { set: typeof setTimeout; clear: typeof clearTimeout } = {
        set: setTimeout,
        clear: clearTimeout,
    },
): { call: (...args: A) => void; cancel: () => void } {
    let handle: ReturnType<typeof setTimeout> | null = null;
    return {
        call(...args: A) {
            if (handle !== null) timers.clear(handle);
            handle = timers.set(() => {
                handle = null;
                fn(...args);
            }, waitMs);
        },
        cancel() {
            if (handle !== null) timers.clear(handle);
            handle = null;
        },
    };
}

/** Pinned labels tracked client-side to decide pin vs unpin on click. */
export class PinTracker {
    readonly pinned = new Set<string>();

    apply(mutation: Mutation): void {
        if (mutation.op === "pin") this.pinned.add(mutation.label);
        else if (mutation.op === "unpin") this.pinned.delete(mutation.label);
        else if (mutation.op === "set_encoding") this.pinned.clear();
    }
}
