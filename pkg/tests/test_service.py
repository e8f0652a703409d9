from __future__ import annotations

import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from jobgrid.config import resolve_config
from jobgrid.export import retrieve_selected_records, to_csv_text
from jobgrid.model import SCHEMA
from jobgrid.selection import Mutation, new_session, selected_count, update_state
from jobgrid.synth import default_scenario, generate_synthetic
from jobgrid.service import create_app
from jobgrid.views import conditional_y_histogram, facet_views

CFG = resolve_config(None, SCHEMA)


@pytest.fixture(scope="module")
def table():
    return generate_synthetic(default_scenario(23))


@pytest.fixture(scope="module")
def client(table):
    return TestClient(create_app(table, CFG))


def _create(client) -> str:
    response = client.post("/sessions")
    assert response.status_code == 200
    body = response.json()
    assert body["revision"] == 0
    return body["session_id"]


class TestSessions:
    def test_create_session_starts_at_revision_zero(self, client):
        sid = _create(client)
        views = client.get(f"/sessions/{sid}/views").json()
        assert views["revision"] == 0
        assert [f["facet"] for f in views["facets"]] == ["short", "standard", "large"]

    def test_unknown_session_is_404(self, client):
        response = client.get("/sessions/deadbeef/views")
        assert response.status_code == 404
        assert response.json()["error"] == "UnknownSession"

    def test_idle_sessions_expire(self, table):
        app = create_app(table, CFG, idle_timeout_s=0.05)
        with TestClient(app) as c:
            sid = _create(c)
            time.sleep(0.12)
            assert c.get(f"/sessions/{sid}/views").status_code == 404


class TestMutations:
    def test_brush_legend_matches_selection_module(self, client, table):
        sid = _create(client)
        response = client.post(
            f"/sessions/{sid}/mutations",
            json={"op": "set_brush", "facet": "standard", "y_range": [100, 1000]},
        )
        assert response.status_code == 200
        assert response.json()["revision"] == 1

        # cross-module oracle: the same state driven through the library
        session = new_session(table, CFG)
        session = update_state(
            session, Mutation(op="set_brush", facet="standard", y_range=(100.0, 1000.0))
        )
        views = client.get(f"/sessions/{sid}/views").json()
        legend = {f["facet"]: f["legend"]["selected_count"] for f in views["facets"]}
        assert legend["standard"] == selected_count(session, "standard")
        assert legend["short"] == 0 and legend["large"] == 0
        assert response.json()["selected_count"] == selected_count(session)

    def test_pin_and_hover_flow(self, client):
        sid = _create(client)
        r1 = client.post(f"/sessions/{sid}/mutations", json={"op": "pin", "label": "u0001"})
        r2 = client.post(f"/sessions/{sid}/mutations", json={"op": "hover", "label": "u0002"})
        r3 = client.post(f"/sessions/{sid}/mutations", json={"op": "clear_hover"})
        assert [r.json()["revision"] for r in (r1, r2, r3)] == [1, 2, 3]
        views = client.get(f"/sessions/{sid}/views").json()
        assert views["revision"] == 3

    def test_malformed_mutation_leaves_state_intact(self, client):
        sid = _create(client)
        client.post(f"/sessions/{sid}/mutations", json={"op": "pin", "label": "u0001"})
        bad = client.post(f"/sessions/{sid}/mutations", json={"op": "warp"})
        assert bad.status_code == 422 or bad.status_code == 400
        bad2 = client.post(
            f"/sessions/{sid}/mutations", json={"op": "pin", "label": "nobody"}
        )
        assert bad2.status_code == 400
        bad3 = client.post(
            f"/sessions/{sid}/mutations", json={"op": "set_brush", "facet": "short", "y_range": [5]}
        )
        assert bad3.status_code == 400
        views = client.get(f"/sessions/{sid}/views").json()
        assert views["revision"] == 1  # only the valid pin landed

    def test_set_encoding_mutation(self, client):
        sid = _create(client)
        response = client.post(
            f"/sessions/{sid}/mutations",
            json={"op": "set_encoding", "config": {"categorical_field": "day_of_week"}},
        )
        assert response.status_code == 200
        views = client.get(f"/sessions/{sid}/views").json()
        entries = views["facets"][0]["categorical"]["entries"]
        assert {label for label, _ in entries} <= {
            "Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun",
        }


class TestConditionalHistogram:
    def test_matches_library_path(self, client, table):
        sid = _create(client)
        bundle = [b for b in facet_views(table, CFG) if b.facet_label == "short"][0]
        col = int(np.argmax(bundle.x_histogram.counts))
        doc = client.get(
            f"/sessions/{sid}/facets/short/columns/{col}/y-histogram"
        ).json()
        expected = conditional_y_histogram(bundle.grid, col)
        assert doc["counts"] == expected.counts.tolist()
        assert doc["facet"] == "short" and doc["column"] == col
        assert doc["binning"]["scale"] == "log"

    def test_unknown_facet_and_column(self, client):
        sid = _create(client)
        assert client.get(f"/sessions/{sid}/facets/huge/columns/0/y-histogram").status_code == 404
        assert (
            client.get(f"/sessions/{sid}/facets/short/columns/9999/y-histogram").status_code == 400
        )


class TestExportEndpoint:
    def test_export_equals_library_retrieval(self, client, table):
        sid = _create(client)
        client.post(
            f"/sessions/{sid}/mutations",
            json={"op": "set_brush", "facet": "short", "y_range": [0, 300]},
        )
        response = client.get(f"/sessions/{sid}/export")
        assert response.status_code == 200
        assert response.headers["x-revision"] == "1"

        session = new_session(table, CFG)
        session = update_state(
            session, Mutation(op="set_brush", facet="short", y_range=(0.0, 300.0))
        )
        expected = to_csv_text(retrieve_selected_records(session))
        got = response.text
        # timestamps in the provenance block differ between the two sessions
        strip = lambda text: [l for l in text.splitlines() if not l.startswith("# timestamp=")]
        assert strip(got) == strip(expected)

    def test_json_format(self, client):
        sid = _create(client)
        response = client.get(f"/sessions/{sid}/export", params={"format": "json"})
        assert response.status_code == 200
        assert response.text.startswith('{"provenance"')


class TestCacheSafety:
    def test_equal_states_serve_equal_documents(self, table):
        app_a = TestClient(create_app(table, CFG))
        app_b = TestClient(create_app(table, CFG))  # fresh cache
        mutations = [
            {"op": "pin", "label": "u0001"},
            {"op": "set_brush", "facet": "short", "y_range": [0, 500]},
        ]
        docs = []
        for client in (app_a, app_a, app_b):  # second pass on app_a hits its cache
            sid = _create(client)
            for m in mutations:
                client.post(f"/sessions/{sid}/mutations", json=m)
            doc = client.get(f"/sessions/{sid}/views").json()
            docs.append(doc)
        assert docs[0] == docs[1] == docs[2]


class TestMeta:
    def test_meta_reports_schema_and_facets(self, client, table):
        meta = client.get("/meta").json()
        assert meta["rows"] == table.n_rows
        assert meta["schema"]["queue_wait"] == "numeric_int"
        assert meta["facets"] == ["short", "standard", "large"]
        assert meta["config"]["y_field"] == "queue_wait"
