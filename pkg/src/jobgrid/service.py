"""HTTP service exposing sessions, faceted view documents, mutations, the
conditional column histogram, and exports to the web client.

Sessions are in-memory, expire after an idle timeout, and are never
persisted. Per-session mutations are serialized behind a lock; the job
table is an immutable shared snapshot. View documents are cached by
(config, filter/brush state) fingerprint; the cache is an accelerator
only and every response can be recomputed from scratch.
"""

from __future__ import annotations

import threading
import time
import uuid
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from .config import EncodingConfig, config_hash, resolve_config
from .errors import (
    BadValue,
    ChannelKindError,
    ColumnOutOfRange,
    JobgridError,
    UnknownFacet,
    UnknownField,
    UnknownLabel,
    UnknownSession,
)
from .export import export_text, retrieve_selected_records
from .model import JobTable
from .selection import Mutation, SessionState, new_session, update_state
from .views import (
    conditional_y_histogram,
    facet_partition,
    facet_views,
    serialize_views,
)

DEFAULT_IDLE_TIMEOUT_S = 3600.0
VIEW_CACHE_SIZE = 64


@dataclass
class _Session:
    state: SessionState
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_used: float = field(default_factory=time.monotonic)


class SessionStore:
    """In-memory session registry with idle expiry."""

    def __init__(self, idle_timeout_s: float = DEFAULT_IDLE_TIMEOUT_S):
        self._sessions: dict[str, _Session] = {}
        self._lock = threading.Lock()
        self.idle_timeout_s = idle_timeout_s

    def create(self, state: SessionState) -> str:
        session_id = uuid.uuid4().hex[:16]
        with self._lock:
            self._sweep()
            self._sessions[session_id] = _Session(state)
        return session_id

    def get(self, session_id: str) -> _Session:
        with self._lock:
            self._sweep()
            session = self._sessions.get(session_id)
            if session is None:
                raise UnknownSession(f"no session {session_id!r}")
            session.last_used = time.monotonic()
            return session

    def _sweep(self) -> None:
        deadline = time.monotonic() - self.idle_timeout_s
        for sid in [s for s, sess in self._sessions.items() if sess.last_used < deadline]:
            del self._sessions[sid]


class ViewCache:
    """Tiny LRU over serialized view documents keyed by state fingerprint."""

    def __init__(self, maxsize: int = VIEW_CACHE_SIZE):
        self._entries: OrderedDict[str, dict] = OrderedDict()
        self._lock = threading.Lock()
        self.maxsize = maxsize

    def get_or_compute(self, key: str, compute):
        with self._lock:
            if key in self._entries:
                self._entries.move_to_end(key)
                return self._entries[key]
        value = compute()
        with self._lock:
            self._entries[key] = value
            self._entries.move_to_end(key)
            while len(self._entries) > self.maxsize:
                self._entries.popitem(last=False)
        return value


_ERROR_STATUS = {
    UnknownSession: 404,
    UnknownFacet: 404,
    UnknownField: 400,
    UnknownLabel: 400,
    ColumnOutOfRange: 400,
    ChannelKindError: 400,
    BadValue: 400,
}


def _mutation_from_body(body: dict, schema: dict) -> Mutation:
    op = body.get("op")
    if not isinstance(op, str):
        raise BadValue("mutation body needs an 'op' string")
    config = None
    if op == "set_encoding":
        config = resolve_config(body.get("config") or {}, schema)
    ranges = {}
    for axis in ("x_range", "y_range"):
        rng = body.get(axis)
        if rng is not None:
            if not isinstance(rng, (list, tuple)) or len(rng) != 2:
                raise BadValue(f"{axis} must be [lo, hi]")
            lo, hi = float(rng[0]), float(rng[1])
            if lo > hi:
                raise BadValue(f"{axis} has lo > hi")
            ranges[axis] = (lo, hi)
    return Mutation(
        op=op,
        facet=body.get("facet"),
        x_range=ranges.get("x_range"),
        y_range=ranges.get("y_range"),
        label=body.get("label"),
        config=config,
    )


def create_app(
    table: JobTable,
    config: EncodingConfig,
    idle_timeout_s: float = DEFAULT_IDLE_TIMEOUT_S,
) -> FastAPI:
    app = FastAPI(title="jobgrid")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = SessionStore(idle_timeout_s)
    cache = ViewCache()

    @app.exception_handler(JobgridError)
    def _handle(request, exc):
        status = _ERROR_STATUS.get(type(exc), 422)
        return JSONResponse({"error": type(exc).__name__, "detail": str(exc)}, status_code=status)

    def _views_doc(state: SessionState) -> dict:
        def compute():
            bundles = facet_views(table, state.config, state)
            _, missing_facet = facet_partition(table, state.config.facet_field)
            return serialize_views(bundles, state.config, excluded_missing_facet=missing_facet)

        doc = dict(cache.get_or_compute(state.state_key(), compute))
        doc["revision"] = state.revision
        return doc

    ui_dir = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if ui_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    @app.get("/meta")
    def meta():
        parts, _ = facet_partition(table, config.facet_field)
        return {
            "rows": table.n_rows,
            "schema": table.schema,
            "config": config.to_mapping(),
            "config_hash": config_hash(config),
            "facets": [label for label, _ in parts],
        }

    @app.post("/sessions")
    def create_session():
        state = new_session(table, config)
        session_id = store.create(state)
        return {
            "session_id": session_id,
            "revision": state.revision,
            "config_hash": config_hash(state.config),
        }

    @app.get("/sessions/{session_id}/views")
    def get_views(session_id: str):
        session = store.get(session_id)
        with session.lock:
            state = session.state
        return _views_doc(state)

    @app.post("/sessions/{session_id}/mutations")
    def post_mutation(session_id: str, body: dict):
        session = store.get(session_id)
        mutation = _mutation_from_body(body, table.schema)
        with session.lock:
            # All-or-nothing: state is replaced only if the update succeeds.
            session.state = update_state(session.state, mutation)
            return {
                "revision": session.state.revision,
                "selected_count": int(len(session.state.selected_ids)),
            }

    @app.get("/sessions/{session_id}/facets/{facet}/columns/{column}/y-histogram")
    def get_conditional_histogram(session_id: str, facet: str, column: int):
        session = store.get(session_id)
        with session.lock:
            state = session.state
        bundles = facet_views(table, state.config, state)
        for bundle in bundles:
            if bundle.facet_label == facet:
                hist = conditional_y_histogram(bundle.grid, column)
                doc = hist.to_document(include_binning=True)
                doc["revision"] = state.revision
                doc["facet"] = facet
                doc["column"] = column
                return doc
        raise UnknownFacet(f"no facet {facet!r}")

    @app.get("/sessions/{session_id}/export")
    def get_export(session_id: str, format: str = "csv"):
        session = store.get(session_id)
        with session.lock:
            state = session.state
        document = retrieve_selected_records(state)
        media = "text/csv" if format == "csv" else "application/json"
        return PlainTextResponse(
            export_text(document, format),
            media_type=media,
            headers={"X-Revision": str(state.revision)},
        )

    return app


def serve(
    table: JobTable,
    config: EncodingConfig,
    host: str = "127.0.0.1",
    port: int = 8787,
    idle_timeout_s: float = DEFAULT_IDLE_TIMEOUT_S,
) -> None:
    """Run the service until interrupted."""
    import uvicorn

    app = create_app(table, config, idle_timeout_s)
    uvicorn.run(app, host=host, port=port, log_level="warning")
