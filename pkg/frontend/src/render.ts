/**
 * SVG/HTML string builders for the small-multiple units. Pure functions of
 * the server documents plus transient render state, so tests can assert on
 * the produced markup without a browser.
 *
 * Layout per unit: legend strip on top, summary grid left, the brushable
 * y histogram on the right-hand side, the brushable x histogram below,
 * and the categorical bars nestled in the lower right.
 */

import {
    binCount,
    formatNumber,
    highlightColor,
    sequentialColor,
} from "./scales.js";
import type { HistogramDocument, UnitDocument } from "./types.js";
import type { UnitViewModel } from "./viewmodel.js";

export const LAYOUT = {
    gridWidth: 420,
    gridHeight: 220,
    xHistHeight: 64,
    yHistWidth: 72,
    catWidth: 72,
    catHeight: 120,
    gap: 8,
} as const;

function escapeXml(text: string): string {
    return text
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

function rect(
    x: number, y: number, w: number, h: number, fill: string, extra = "",
): string {
    return `<rect x="${x.toFixed(1)}" y="${y.toFixed(1)}" width="${w.toFixed(1)}" ` +
        `height="${h.toFixed(1)}" fill="${fill}" ${extra}/>`;
}

export function renderLegend(doc: UnitDocument): string {
    const { selected_count, color_min, color_max } = doc.legend;
    const extents =
        color_min === null || color_max === null
            ? "no data"
            : `${formatNumber(color_min)} &#8230; ${formatNumber(color_max)}`;
    const swatches = [0, 0.25, 0.5, 0.75, 1]
        .map((t) =>
            `<span class="swatch" style="background:${sequentialColor(t, 0, 1)}"></span>`)
        .join("");
    return (
        `<div class="legend">` +
        `<span class="selected"># of Records Selected: ` +
        `<b data-role="selected-count">${selected_count}</b></span>` +
        `<span class="ramp">${swatches} ${escapeXml(doc.grid.color_field)} ` +
        `(${doc.grid.aggregation}) <span data-role="extents">${extents}</span></span>` +
        `</div>`
    );
}

export function renderGrid(vm: UnitViewModel): string {
    const doc = vm.doc;
    const nCols = binCount(doc.grid.x);
    const nRows = binCount(doc.grid.y);
    const { gridWidth: W, gridHeight: H } = LAYOUT;
    if (nCols === 0 || nRows === 0) {
        return `<svg class="grid" width="${W}" height="${H}"></svg>`;
    }
    const lo = doc.legend.color_min ?? 0;
    const hi = doc.legend.color_max ?? 1;
    const highlighted = new Set(doc.highlighted.map(([c, r]) => `${c},${r}`));
    const cellW = W / nCols;
    const cellH = H / nRows;
    const cells: string[] = [];
    for (let col = 0; col < nCols; col++) {
        for (let row = 0; row < nRows; row++) {
            const value = doc.grid.aggregates[col][row];
            if (value === null) continue;
            const ramp = highlighted.has(`${col},${row}`) ? highlightColor : sequentialColor;
            // row 0 is the lowest value band: draw from the bottom up
            cells.push(rect(
                col * cellW, H - (row + 1) * cellH, Math.max(cellW - 0.5, 0.5),
                Math.max(cellH - 0.5, 0.5), ramp(value, lo, hi),
                `data-col="${col}" data-row="${row}" class="cell"`,
            ));
        }
    }
    return `<svg class="grid" data-role="grid" width="${W}" height="${H}">${cells.join("")}</svg>`;
}

export function renderHistogram(
    hist: HistogramDocument,
    width: number,
    height: number,
    brushed: [number, number] | null = null,
): string {
    const counts = hist.counts;
    const n = counts.length;
    const peak = Math.max(...counts, 1);
    const bars: string[] = [];
    if (hist.orientation === "x") {
        const band = width / Math.max(n, 1);
        counts.forEach((count, i) => {
            const h = (count / peak) * (height - 2);
            bars.push(rect(
                i * band, height - h, Math.max(band - 0.5, 0.5), h,
                "var(--bar, #7291b8)", `data-bin="${i}" class="bar"`,
            ));
        });
    } else {
        const band = height / Math.max(n, 1);
        counts.forEach((count, i) => {
            const w = (count / peak) * (width - 2);
            bars.push(rect(
                0, height - (i + 1) * band, w, Math.max(band - 0.5, 0.5),
                "var(--bar, #7291b8)", `data-bin="${i}" class="bar"`,
            ));
        });
    }
    let brushRect = "";
    if (brushed !== null) {
        const [a, b] = brushed;
        brushRect = hist.orientation === "x"
            ? rect(a, 0, b - a, height, "rgba(240,140,40,0.25)", 'class="brush"')
            : rect(0, Math.min(a, b), width, Math.abs(b - a), "rgba(240,140,40,0.25)", 'class="brush"');
    }
    return (
        `<svg class="hist hist-${hist.orientation}" data-role="${hist.orientation}-histogram" ` +
        `width="${width}" height="${height}">${bars.join("")}${brushRect}</svg>`
    );
}

export function renderCategorical(doc: UnitDocument): string {
    const entries = doc.categorical.entries;
    const { catWidth: W, catHeight: H } = LAYOUT;
    const peak = Math.max(...entries.map(([, count]) => count), 1);
    const band = W / Math.max(entries.length, 1);
    const bars = entries.map(([label, count], i) => {
        const h = (count / peak) * (H - 18);
        return (
            `<g class="cat-bar" data-label="${escapeXml(label)}" data-count="${count}">` +
            rect(i * band, H - 14 - h, Math.max(band - 1, 1), h, "var(--cat, #5e7ca6)") +
            `<title>${escapeXml(label)}: ${count}</title></g>`
        );
    });
    const badge = doc.categorical.truncated
        ? `<text class="badge" data-role="truncated-badge" x="${W - 2}" y="10" ` +
          `text-anchor="end" font-size="9">top 10</text>`
        : "";
    return (
        `<svg class="categorical" data-role="categorical" data-field="${escapeXml(doc.categorical.field)}" ` +
        `width="${W}" height="${H}">${bars.join("")}${badge}</svg>`
    );
}

export function renderUnit(vm: UnitViewModel): string {
    const doc = vm.doc;
    const title = escapeXml(doc.facet ?? "all records");
    if (vm.degraded) {
        return (
            `<section class="unit degraded" data-facet="${title}">` +
            `<header>${title}</header>` +
            `<div class="banner" data-role="degraded-banner">view degraded: ` +
            `malformed document for this unit</div></section>`
        );
    }
    if (doc.scope_count === 0) {
        return (
            `<section class="unit empty" data-facet="${title}">` +
            `<header>${title}</header>` + renderLegend(doc) +
            `<div class="empty-state" data-role="empty-state">no records in scope</div>` +
            `</section>`
        );
    }
    const conditional: HistogramDocument | null = vm.conditionalCounts
        ? { orientation: "y", counts: vm.conditionalCounts }
        : null;
    const yHist = renderHistogram(
        conditional ?? doc.y_histogram, LAYOUT.yHistWidth, LAYOUT.gridHeight,
    );
    const xHist = renderHistogram(doc.x_histogram, LAYOUT.gridWidth, LAYOUT.xHistHeight);
    return (
        `<section class="unit" data-facet="${title}" data-scope="${doc.scope_count}">` +
        `<header>${title} <span class="scope">(${doc.scope_count} records)</span></header>` +
        renderLegend(doc) +
        `<div class="grid-row">${renderGrid(vm)}${yHist}</div>` +
        `<div class="bottom-row">${xHist}${renderCategorical(doc)}</div>` +
        `</section>`
    );
}

/** One unit per facet, in served order. */
export function renderUnits(vms: UnitViewModel[]): string {
    if (vms.length === 0) return `<div class="banner">no facets served</div>`;
    return vms.map(renderUnit).join("\n");
}
