/**
 * Browser wiring: one rendering thread of control around the service API.
 * Network responses are applied in revision order (stale ones dropped),
 * hovers are debounced at 150 ms with last-write-wins, and the export
 * button downloads exactly what the export endpoint returns.
 */

import { ApiClient } from "./api.js";
import { renderUnits } from "./render.js";
import type { MetaDocument, Mutation, ViewsDocument } from "./types.js";
import {
    PinTracker,
    RevisionGuard,
    type UnitViewModel,
    brushMutation,
    categoryMutation,
    debounce,
    toViewModels,
} from "./viewmodel.js";
import { LAYOUT } from "./render.js";

const CHANNEL_FIELDS: Record<string, (kind: string) => boolean> = {
    x_field: (kind) => kind === "datetime" || kind.startsWith("numeric"),
    y_field: (kind) => kind.startsWith("numeric"),
    color_field: (kind) => kind.startsWith("numeric"),
    categorical_field: (kind) => kind === "categorical",
    facet_field: (kind) => kind === "categorical",
};

class App {
    private sessionId = "";
    private guard = new RevisionGuard();
    private pins = new PinTracker();
    private vms: UnitViewModel[] = [];
    private meta: MetaDocument | null = null;
    private inflight: AbortController | null = null;
    private hoverDebounce = debounce((m: Mutation) => void this.mutate(m), 150);
    private drag: { facet: string; orientation: "x" | "y"; start: number } | null = null;

    constructor(
        private api: ApiClient,
        private unitsEl: HTMLElement,
        private panelEl: HTMLElement,
        private statusEl: HTMLElement,
    ) {}

    async start(): Promise<void> {
        this.meta = await this.api.meta();
        this.sessionId = (await this.api.createSession()).session_id;
        this.renderPanel();
        await this.refresh();
        this.attachUnitHandlers();
    }

    private async refresh(): Promise<void> {
        this.inflight?.abort();
        this.inflight = new AbortController();
        let doc: ViewsDocument;
        try {
            doc = await this.api.views(this.sessionId, this.inflight.signal);
        } catch (error) {
            if ((error as Error).name === "AbortError") return;
            this.statusEl.textContent = `service error: ${(error as Error).message}`;
            return;
        }
        if (!this.guard.shouldApply(doc.revision)) return; // stale response

        this.vms = toViewModels(doc);
        this.unitsEl.innerHTML = renderUnits(this.vms);
        this.statusEl.textContent =
            `revision ${doc.revision} · config ${doc.config_hash}`;
    }

    private async mutate(mutation: Mutation): Promise<void> {
        try {
            await this.api.mutate(this.sessionId, mutation);
            this.pins.apply(mutation);
        } catch (error) {
            this.statusEl.textContent = `mutation rejected: ${(error as Error).message}`;
            return;
        }
        await this.refresh();
    }

    // ---- gesture wiring -------------------------------------------------

    private attachUnitHandlers(): void {
        this.unitsEl.addEventListener("mousedown", (event) => {
            const hist = (event.target as Element).closest("svg.hist");
            const unit = (event.target as Element).closest(".unit");
            if (!hist || !unit) return;
            const orientation = hist.classList.contains("hist-x") ? "x" : "y";
            this.drag = {
                facet: unit.getAttribute("data-facet") ?? "",
                orientation,
                start: this.histPixel(event, hist as SVGSVGElement, orientation),
            };
        });
        this.unitsEl.addEventListener("mouseup", (event) => {
            if (this.drag === null) return;
            const hist = (event.target as Element).closest("svg.hist");
            const { facet, orientation, start } = this.drag;
            this.drag = null;
            const vm = this.vms.find((v) => v.doc.facet === facet);
            if (!vm || vm.degraded) return;
            const end = hist
                ? this.histPixel(event, hist as SVGSVGElement, orientation)
                : start; // released off-plot: treat as zero-width (clear)
            const axis = orientation === "x" ? vm.doc.grid.x : vm.doc.grid.y;
            const counts = orientation === "x"
                ? vm.doc.x_histogram.counts : vm.doc.y_histogram.counts;
            const extent = orientation === "x" ? LAYOUT.gridWidth : LAYOUT.gridHeight;
            const mutation = brushMutation(
                facet, axis, orientation, counts.length, 0, extent, start, end,
            );
            if (mutation) void this.mutate(mutation);
        });

        this.unitsEl.addEventListener("mouseover", (event) => {
            const bar = (event.target as Element).closest("g.cat-bar");
            if (bar) {
                const label = bar.getAttribute("data-label") ?? "";
                this.hoverDebounce.call(categoryMutation(label, "hover", this.pins.pinned));
                return;
            }
            const cell = (event.target as Element).closest("rect.cell");
            if (cell) void this.hoverColumn(event, Number(cell.getAttribute("data-col")));
        });
        this.unitsEl.addEventListener("mouseout", (event) => {
            if ((event.target as Element).closest("g.cat-bar")) {
                this.hoverDebounce.call(categoryMutation("", "leave", this.pins.pinned));
            }
        });
        this.unitsEl.addEventListener("click", (event) => {
            const bar = (event.target as Element).closest("g.cat-bar");
            if (!bar) return;
            this.hoverDebounce.cancel();
            const label = bar.getAttribute("data-label") ?? "";
            void this.mutate(categoryMutation(label, "click", this.pins.pinned));
        });
    }

    private histPixel(event: MouseEvent, svg: SVGSVGElement, orientation: "x" | "y"): number {
        const box = svg.getBoundingClientRect();
        return orientation === "x" ? event.clientX - box.left : event.clientY - box.top;
    }

    /** Column hover conditions the right-hand histogram on that column. */
    private async hoverColumn(event: Event, column: number): Promise<void> {
        const unit = (event.target as Element).closest(".unit");
        const facet = unit?.getAttribute("data-facet");
        const vm = this.vms.find((v) => v.doc.facet === facet);
        if (!vm || !facet || Number.isNaN(column)) return;
        const doc = await this.api.conditionalHistogram(this.sessionId, facet, column);
        if (doc.revision < this.guard.current) return; // stale
        vm.hoveredColumn = column;
        vm.conditionalCounts = doc.counts;
        this.unitsEl.innerHTML = renderUnits(this.vms);
    }

    // ---- side panel ------------------------------------------------------

    private renderPanel(): void {
        if (!this.meta) return;
        const schema = this.meta.schema;
        const config = this.meta.config;
        const fieldOptions = (filter: (kind: string) => boolean, current: unknown) =>
            Object.entries(schema)
                .filter(([, kind]) => filter(kind))
                .map(([name]) =>
                    `<option value="${name}"${name === current ? " selected" : ""}>${name}</option>`)
                .join("");
        const selects = Object.entries(CHANNEL_FIELDS)
            .map(([channel, filter]) =>
                `<label>${channel.replace("_field", "")} ` +
                `<select data-key="${channel}">${fieldOptions(filter, config[channel])}</select>` +
                `</label>`)
            .join("");
        const aggregations = ["mean", "median", "sum", "count", "max"]
            .map((a) => `<option${a === config.aggregation ? " selected" : ""}>${a}</option>`)
            .join("");
        this.panelEl.innerHTML =
            `${selects}<label>aggregation <select data-key="aggregation">${aggregations}</select></label>` +
            `<button data-role="apply-encoding">apply encoding</button>` +
            `<button data-role="export">download selection (CSV)</button>`;

        this.panelEl
            .querySelector('[data-role="apply-encoding"]')!
            .addEventListener("click", () => {
                // the dropdowns edit the same key-value configuration document
                const config: Record<string, string> = {};
                this.panelEl.querySelectorAll("select[data-key]").forEach((el) => {
                    const select = el as HTMLSelectElement;
                    config[select.dataset.key!] = select.value;
                });
                void this.mutate({ op: "set_encoding", config });
            });
        this.panelEl
            .querySelector('[data-role="export"]')!
            .addEventListener("click", () => void this.downloadExport());
    }

    private async downloadExport(): Promise<void> {
        const { text, revision } = await this.api.exportText(this.sessionId, "csv");
        const blob = new Blob([text], { type: "text/csv" });
        const url = URL.createObjectURL(blob);
        const anchor = document.createElement("a");
        anchor.href = url;
        anchor.download = `jobgrid-selection-r${revision}.csv`;
        anchor.click();
        URL.revokeObjectURL(url);
    }
}

export function boot(): void {
    const params = new URLSearchParams(window.location.search);
    const base = params.get("service")
        ?? (window.location.pathname.includes("/ui")
            ? window.location.origin
            : "http://127.0.0.1:8787");
    const app = new App(
        new ApiClient(base),
        document.getElementById("units")!,
        document.getElementById("panel")!,
        document.getElementById("status")!,
    );
    void app.start();
}

if (typeof document !== "undefined" && document.getElementById("units")) {
    boot();
}
