/**
 * Pure geometry: pixel bands for bins, brush snapping, and the color
 * ramps. No DOM, no server state; everything here is testable alone.
 */

import type { AxisDocument } from "./types.js";

/** Number of bins an axis document describes (nonpositive bin included). */
export function binCount(axis: AxisDocument): number {
    if (axis.degenerate) return 1;
    if (axis.edges.length === 0) return 0;
    return axis.edges.length - 1 + (axis.has_nonpositive_bin ? 1 : 0);
}

export interface BandGeometry {
    /** Pixel position where bin 0 starts. */
    origin: number;
    /** Pixels per bin; negative when bin index grows against pixels (y axes). */
    step: number;
    bins: number;
}

/**
 * Equal-width pixel bands over [pixelLo, pixelHi]. For vertical histograms
 * pass flip=true so bin 0 (lowest value) sits at the bottom edge.
 */
export function bandGeometry(
    bins: number,
    pixelLo: number,
    pixelHi: number,
    flip = false,
): BandGeometry {
    const span = pixelHi - pixelLo;
    const step = span / Math.max(bins, 1);
    return flip
        ? { origin: pixelHi, step: -step, bins }
        : { origin: pixelLo, step, bins };
}

/** Pixel band [lo, hi] of one bin. */
export function binBand(geometry: BandGeometry, index: number): [number, number] {
    const a = geometry.origin + geometry.step * index;
    const b = geometry.origin + geometry.step * (index + 1);
    return a <= b ? [a, b] : [b, a];
}

/** Bin index under a pixel; out-of-plot positions clamp to the axis extent. */
export function pixelToBin(geometry: BandGeometry, pixel: number): number {
    const raw = Math.floor((pixel - geometry.origin) / geometry.step);
    return Math.min(Math.max(raw, 0), geometry.bins - 1);
}

/**
 * Snap a pixel drag to bin boundaries. A zero-width click means "clear the
 * brush" and returns null; otherwise the inclusive bin index range.
 */
export function snapDragToBins(
    geometry: BandGeometry,
    pixelA: number,
    pixelB: number,
): { lo: number; hi: number } | null {
    if (pixelA === pixelB || geometry.bins === 0) return null;
    const a = pixelToBin(geometry, pixelA);
    const b = pixelToBin(geometry, pixelB);
    return { lo: Math.min(a, b), hi: Math.max(a, b) };
}

/**
 * Convert an inclusive bin index range to a closed data-unit interval
 * [first bin's lower edge, last bin's upper edge]. The dedicated
 * nonpositive bin reaches down to 0 (every bindable field is nonnegative).
 */
export function binRangeToData(
    axis: AxisDocument,
    lo: number,
    hi: number,
): [number, number] {
    if (axis.degenerate) return [axis.edges[0], axis.edges[0]];
    const shift = axis.has_nonpositive_bin ? 1 : 0;
    const dataLo =
        axis.has_nonpositive_bin && lo === 0
            ? Math.min(0, axis.edges[0])
            : axis.edges[lo - shift];
    const dataHi = axis.edges[hi - shift + 1];
    return [dataLo, dataHi];
}

/**
 * Sequential monochrome ramp for cell aggregates: light for the low extent,
 * dark for the high. Extents come from the served legend, never recomputed.
 */
export function sequentialColor(
    value: number,
    min: number,
    max: number,
): string {
    const t = max > min ? (value - min) / (max - min) : 0.5;
    const lightness = 92 - 62 * Math.min(Math.max(t, 0), 1);
    return `hsl(215, 35%, ${lightness.toFixed(1)}%)`;
}

/** Orange ramp for cells holding selected records. */
export function highlightColor(value: number, min: number, max: number): string {
    const t = max > min ? (value - min) / (max - min) : 0.5;
    const lightness = 85 - 45 * Math.min(Math.max(t, 0), 1);
    return `hsl(28, 90%, ${lightness.toFixed(1)}%)`;
}

/** Compact tick label for axis extents and legend endpoints. */
export function formatNumber(value: number): string {
    if (!Number.isFinite(value)) return String(value);
    const abs = Math.abs(value);
    if (abs >= 1e6 || (abs > 0 && abs < 1e-3)) return value.toExponential(1);
    if (Number.isInteger(value)) return String(value);
    return value.toPrecision(3);
}
