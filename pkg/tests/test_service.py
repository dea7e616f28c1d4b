"""Collection service API: sessions, submissions, consensus outputs."""

from __future__ import annotations

import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from napgraph import SessionStore, gabriel_graph, parse_table, table_to_tablecloths
from napgraph.service import create_app

NAMES8 = [f"w{i}" for i in range(1, 9)]


@pytest.fixture
def client(tmp_path):
    store = SessionStore(tmp_path / "sessions")
    app = create_app(store)
    with TestClient(app) as c:
        c.store = store
        yield c


def make_session(client, names=None):
    resp = client.post("/sessions", json={"sample_names": names or NAMES8})
    assert resp.status_code == 201
    return resp.json()["id"]


def submission(assessor, names, coords):
    return {
        "assessor_id": assessor,
        "placements": [
            {"sample": n, "x": float(x), "y": float(y)}
            for n, (x, y) in zip(names, coords)
        ],
    }


def random_coords(n, seed):
    rng = np.random.default_rng(seed)
    return rng.uniform(0.05, 0.95, size=(n, 2))


class TestCreateSession:
    def test_create_eight_samples(self, client):
        resp = client.post("/sessions", json={"sample_names": NAMES8})
        assert resp.status_code == 201
        body = resp.json()
        assert body["sample_names"] == NAMES8
        assert body["tablecloth_count"] == 0
        assert body["sheet"] == {"width": 60.0, "height": 40.0}

    def test_single_name_rejected(self, client):
        resp = client.post("/sessions", json={"sample_names": ["only"]})
        assert resp.status_code == 422

    def test_duplicate_names_rejected(self, client):
        resp = client.post("/sessions", json={"sample_names": ["a", "a", "b"]})
        assert resp.status_code == 422

    def test_two_creates_distinct_ids(self, client):
        assert make_session(client) != make_session(client)

    def test_custom_sheet(self, client):
        resp = client.post(
            "/sessions", json={"sample_names": ["a", "b"], "sheet": {"width": 84, "height": 59}}
        )
        assert resp.json()["sheet"] == {"width": 84.0, "height": 59.0}

    def test_get_unknown_session(self, client):
        assert client.get("/sessions/doesnotexist").status_code == 404


class TestSubmissions:
    def test_valid_submission_increments_count(self, client):
        sid = make_session(client)
        resp = client.post(
            f"/sessions/{sid}/tablecloths",
            json=submission("ann", NAMES8, random_coords(8, 1)),
        )
        assert resp.status_code == 200
        assert resp.json() == {"status": "accepted", "tablecloth_count": 1}
        assert client.get(f"/sessions/{sid}").json()["assessor_ids"] == ["ann"]

    def test_resubmission_replaces(self, client):
        sid = make_session(client)
        client.post(
            f"/sessions/{sid}/tablecloths",
            json=submission("ann", NAMES8, random_coords(8, 1)),
        )
        resp = client.post(
            f"/sessions/{sid}/tablecloths",
            json=submission("ann", NAMES8, random_coords(8, 2)),
        )
        assert resp.json() == {"status": "replaced", "tablecloth_count": 1}

    def test_missing_sample_named_in_error(self, client):
        sid = make_session(client)
        payload = submission("ann", NAMES8[:-1], random_coords(7, 1))
        resp = client.post(f"/sessions/{sid}/tablecloths", json=payload)
        assert resp.status_code == 422
        assert "w8" in resp.json()["detail"]

    def test_unknown_sample_rejected(self, client):
        sid = make_session(client, names=["a", "b"])
        payload = submission("ann", ["a", "zz"], [(0.1, 0.1), (0.9, 0.9)])
        resp = client.post(f"/sessions/{sid}/tablecloths", json=payload)
        assert resp.status_code == 422
        assert "zz" in resp.json()["detail"]

    def test_out_of_range_coordinates_rejected(self, client):
        sid = make_session(client, names=["a", "b"])
        payload = submission("ann", ["a", "b"], [(0.5, 0.5), (1.2, 0.5)])
        resp = client.post(f"/sessions/{sid}/tablecloths", json=payload)
        assert resp.status_code == 422

    def test_unknown_session_404(self, client):
        payload = submission("ann", ["a", "b"], [(0.1, 0.1), (0.9, 0.9)])
        assert client.post("/sessions/zzz/tablecloths", json=payload).status_code == 404

    def test_normalized_coords_scaled_to_sheet(self, client):
        sid = make_session(client, names=["a", "b"])
        client.post(
            f"/sessions/{sid}/tablecloths",
            json=submission("ann", ["a", "b"], [(0.5, 0.5), (1.0, 0.0)]),
        )
        session = client.store.load(sid)
        assert np.allclose(session.tablecloths[0].positions, [[30, 20], [60, 0]])

    def test_durability_across_store_restart(self, client, tmp_path):
        sid = make_session(client)
        client.post(
            f"/sessions/{sid}/tablecloths",
            json=submission("ann", NAMES8, random_coords(8, 3)),
        )
        fresh = SessionStore(tmp_path / "sessions")
        assert len(fresh.load(sid).tablecloths) == 1


class TestConsensus:
    def test_empty_session_conflict(self, client):
        sid = make_session(client)
        assert client.get(f"/sessions/{sid}/consensus").status_code == 409
        assert client.get(f"/sessions/{sid}/export.csv").status_code == 409

    def test_json_format(self, client):
        sid = make_session(client)
        for a in range(3):
            client.post(
                f"/sessions/{sid}/tablecloths",
                json=submission(f"a{a}", NAMES8, random_coords(8, a)),
            )
        body = client.get(f"/sessions/{sid}/consensus?format=json").json()
        assert body["assessor_count"] == 3
        assert body["sample_count"] == 8
        assert len(body["positions"]) == 8
        assert body["converged"] in (True, False)
        counts = np.array(body["counts"])
        assert counts.max() <= 3

    def test_single_assessor_edges_all_maximal(self, client):
        sid = make_session(client, names=["a", "b", "c"])
        client.post(
            f"/sessions/{sid}/tablecloths",
            json=submission("solo", ["a", "b", "c"], [(0.1, 0.1), (0.5, 0.8), (0.9, 0.2)]),
        )
        svg = client.get(f"/sessions/{sid}/consensus?format=svg")
        assert svg.status_code == 200
        assert svg.headers["x-assessor-count"] == "1"
        widths = set()
        for chunk in svg.text.split('stroke-width="')[1:]:
            widths.add(chunk.split('"')[0])
        widths.discard("1.5")  # node outline stroke
        widths.discard("0.5")  # legend frame stroke
        assert len(widths) == 1  # every drawn edge has force 1/1

    def test_csv_and_json_agree(self, client):
        sid = make_session(client)
        for a in range(4):
            client.post(
                f"/sessions/{sid}/tablecloths",
                json=submission(f"a{a}", NAMES8, random_coords(8, 10 + a)),
            )
        csv_resp = client.get(f"/sessions/{sid}/consensus?format=csv")
        body = client.get(f"/sessions/{sid}/consensus?format=json").json()
        lines = csv_resp.text.strip().split("\n")
        assert lines[0].split(",")[1:] == NAMES8
        parsed = [list(map(int, line.split(",")[1:])) for line in lines[1:]]
        assert parsed == body["counts"]
        assert csv_resp.headers["x-final-energy"] == repr(body["final_energy"])

    def test_svg_headers_and_content_type(self, client):
        sid = make_session(client, names=["a", "b"])
        client.post(
            f"/sessions/{sid}/tablecloths",
            json=submission("ann", ["a", "b"], [(0.2, 0.2), (0.8, 0.8)]),
        )
        resp = client.get(f"/sessions/{sid}/consensus?format=svg")
        assert resp.headers["content-type"].startswith("image/svg+xml")
        assert resp.headers["x-converged"] in ("true", "false")
        assert resp.text.startswith("<?xml")

    def test_export_parses_and_matches_submissions(self, client):
        sid = make_session(client)
        coords = random_coords(8, 77)
        client.post(f"/sessions/{sid}/tablecloths", json=submission("ann", NAMES8, coords))
        table = parse_table(client.get(f"/sessions/{sid}/export.csv").text)
        assert table.sample_names == NAMES8
        assert table.assessor_ids == ["ann"]
        expected = coords * np.array([60.0, 40.0])
        assert np.allclose(table.values.reshape(8, 2), expected)

    def test_matrix_equals_direct_gabriel_adjacency(self, client):
        """One submitted tablecloth: the matrix is its Gabriel adjacency."""
        sid = make_session(client)
        coords = random_coords(8, 5)
        client.post(f"/sessions/{sid}/tablecloths", json=submission("ann", NAMES8, coords))
        body = client.get(f"/sessions/{sid}/consensus?format=json").json()
        table = parse_table(client.get(f"/sessions/{sid}/export.csv").text)
        graph = gabriel_graph(table_to_tablecloths(table)[0])
        assert np.array_equal(np.array(body["counts"]), graph.adjacency())

    def test_worked_example_session_matrix_entry(self, client, worked_example_table):
        """Loading the four example tablecloths over the API reproduces the
        known (1,2)=3 similarity entry in the CSV output."""
        names = worked_example_table.sample_names
        sid = make_session(client, names=names)
        sheet = worked_example_table.sheet
        for cloth in table_to_tablecloths(worked_example_table):
            payload = {
                "assessor_id": cloth.assessor_id,
                "placements": [
                    {
                        "sample": name,
                        "x": float(x) / sheet.width,
                        "y": float(y) / sheet.height,
                    }
                    for name, (x, y) in zip(names, cloth.positions)
                ],
            }
            assert client.post(f"/sessions/{sid}/tablecloths", json=payload).status_code == 200
        csv_text = client.get(f"/sessions/{sid}/consensus?format=csv").text
        lines = csv_text.strip().split("\n")
        header = lines[0].split(",")
        row1 = lines[1].split(",")
        assert row1[0] == "1"
        assert row1[header.index("2")] == "3"

    def test_seed_accepted(self, client):
        sid = make_session(client, names=["a", "b"])
        client.post(
            f"/sessions/{sid}/tablecloths",
            json=submission("ann", ["a", "b"], [(0.2, 0.2), (0.8, 0.8)]),
        )
        one = client.get(f"/sessions/{sid}/consensus?format=svg&seed=9")
        two = client.get(f"/sessions/{sid}/consensus?format=svg&seed=9")
        assert one.content == two.content
