/**
 * Thin fetch client for the jobgrid service. Requests are cancellable and
 * every response body carries (or is tagged with) the revision it reflects.
 */

import type {
    ConditionalHistogramDocument,
    MetaDocument,
    Mutation,
    MutationResponse,
    ViewsDocument,
} from "./types.js";

export class ApiError extends Error {
    constructor(public status: number, public errorName: string, detail: string) {
        super(`${errorName}: ${detail}`);
    }
}

async function parseError(response: Response): Promise<never> {
    let name = "HttpError";
    let detail = response.statusText;
    try {
        const body = await response.json();
        name = body.error ?? name;
        detail = body.detail ?? detail;
    } catch {
        // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, name, detail);
}

export class ApiClient {
    constructor(public readonly baseUrl: string) {}

    private async getJson<T>(path: string, signal?: AbortSignal): Promise<T> {
        const response = await fetch(this.baseUrl + path, { signal });
        if (!response.ok) await parseError(response);
        return (await response.json()) as T;
    }

    meta(signal?: AbortSignal): Promise<MetaDocument> {
        return this.getJson("/meta", signal);
    }

    async createSession(): Promise<{ session_id: string; revision: number }> {
        const response = await fetch(this.baseUrl + "/sessions", { method: "POST" });
        if (!response.ok) await parseError(response);
        return await response.json();
    }

    views(sessionId: string, signal?: AbortSignal): Promise<ViewsDocument> {
        return this.getJson(`/sessions/${sessionId}/views`, signal);
    }

    async mutate(sessionId: string, mutation: Mutation): Promise<MutationResponse> {
        const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/mutations`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(mutation),
        });
        if (!response.ok) await parseError(response);
        return await response.json();
    }

    conditionalHistogram(
        sessionId: string,
        facet: string,
        column: number,
        signal?: AbortSignal,
    ): Promise<ConditionalHistogramDocument> {
        return this.getJson(
            `/sessions/${sessionId}/facets/${encodeURIComponent(facet)}/columns/${column}/y-histogram`,
            signal,
        );
    }

    /** Export download body plus the revision it reflects. */
    async exportText(
        sessionId: string,
        format: "csv" | "json" = "csv",
    ): Promise<{ text: string; revision: number }> {
        const response = await fetch(
            `${this.baseUrl}/sessions/${sessionId}/export?format=${format}`,
        );
        if (!response.ok) await parseError(response);
        return {
            text: await response.text(),
            revision: Number(response.headers.get("x-revision") ?? -1),
        };
    }
}
