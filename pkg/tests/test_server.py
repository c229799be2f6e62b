import json
from pathlib import Path

import jsonschema
import pytest
from fastapi.testclient import TestClient

import rvss
from rvss.seeds import SpaceConfig
from rvss.server import create_app

from conftest import BANK_TEXT, MONEY_CLIQUE, RIVER_CLIQUE

SCHEMA = json.loads(
    (Path(rvss.__file__).parent / "schemas" / "api.schema.json").read_text()
)


def validate(instance, name: str) -> None:
    jsonschema.validate(instance, {"$defs": SCHEMA["$defs"], "$ref": f"#/$defs/{name}"})


@pytest.fixture()
def client():
    lex = rvss.parse_cliques(BANK_TEXT)
    space = rvss.build_space(lex, SpaceConfig(dim=512, m=8, global_seed=3))
    app = create_app(space)
    with TestClient(app) as c:
        yield c


class TestTerms:
    def test_prefix_listing_lexicographic(self, client):
        resp = client.get("/terms", params={"prefix": "s"})
        assert resp.status_code == 200
        body = resp.json()
        validate(body, "terms")
        assert body["terms"] == sorted(body["terms"])
        assert {"savings", "shore", "stream"} <= set(body["terms"])

    def test_limit_one(self, client):
        body = client.get("/terms", params={"prefix": "", "limit": 1}).json()
        assert len(body["terms"]) == 1

    def test_no_matches_is_200_empty(self, client):
        resp = client.get("/terms", params={"prefix": "zzz"})
        assert resp.status_code == 200
        assert resp.json()["terms"] == []

    def test_bad_limit_rejected(self, client):
        assert client.get("/terms", params={"limit": 0}).status_code == 400
        assert client.get("/terms", params={"limit": 1001}).status_code == 400


class TestNeighbors:
    def test_self_leads(self, client):
        resp = client.get("/neighbors", params={"term": "bank", "k": 5})
        assert resp.status_code == 200
        body = resp.json()
        validate(body, "neighbors")
        assert body["entries"][0]["term"] == "bank"
        assert body["entries"][0]["similarity"] == pytest.approx(1.0, abs=1e-5)

    def test_repeat_requests_identical_bytes(self, client):
        a = client.get("/neighbors", params={"term": "bank", "k": 10})
        b = client.get("/neighbors", params={"term": "bank", "k": 10})
        assert a.content == b.content

    def test_unknown_term_404(self, client):
        resp = client.get("/neighbors", params={"term": "nope"})
        assert resp.status_code == 404
        body = resp.json()
        validate(body, "error")
        assert "term not found: nope" in body["detail"]

    def test_dependent_minus_422_names_term(self, client):
        resp = client.get(
            "/neighbors", params={"term": "bank", "minus": "river,river"}
        )
        assert resp.status_code == 422
        assert "river" in resp.json()["detail"]

    def test_sense_subtraction_reorders(self, client):
        body = client.get(
            "/neighbors", params={"term": "bank", "k": 10, "minus": "river"}
        ).json()
        assert body["subtracted_terms"] == ["river"]
        ranked = [e["term"] for e in body["entries"]]
        money = [t for t in MONEY_CLIQUE if t != "bank" and t in ranked]
        river = [t for t in RIVER_CLIQUE if t != "bank" and t in ranked]
        assert money
        if river:
            assert min(ranked.index(t) for t in money) < min(ranked.index(t) for t in river)


class TestOtherEndpoints:
    def test_clusters(self, client):
        resp = client.get("/clusters", params={"term": "bank"})
        assert resp.status_code == 200
        body = resp.json()
        validate(body, "clusters")
        assert len(body["clusters"]) == 2

    def test_similarity_self(self, client):
        body = client.get("/similarity", params={"a": "bank", "b": "bank"}).json()
        validate(body, "similarity")
        assert body["similarity"] == pytest.approx(1.0, abs=1e-5)

    def test_noise_pmf_sums_to_one(self, client):
        resp = client.get("/noise/pmf", params={"d": 250, "m": 4})
        assert resp.status_code == 200
        body = resp.json()
        validate(body, "noise_pmf")
        assert abs(sum(body["probs"]) - 1.0) < 1e-9

    def test_noise_pmf_bad_config(self, client):
        assert client.get("/noise/pmf", params={"d": 8, "m": 4}).status_code == 400


class TestUpdates:
    def test_disjoint_clique_touches_two(self, client):
        before = client.get("/terms", params={"limit": 1}).json()["checksum"]
        resp = client.post("/cliques", json={"terms": ["alpha", "beta"]})
        assert resp.status_code == 200
        body = resp.json()
        validate(body, "update")
        assert len(body["touched_terms"]) == 2
        assert set(body["created_terms"]) == {"alpha", "beta"}
        assert body["checksum"] != before
        after = client.get("/terms", params={"prefix": "alpha"}).json()
        assert after["terms"] == ["alpha"]
        assert after["checksum"] == body["checksum"]

    def test_snapshot_isolation(self, client):
        session = client.app.state.session
        old_snap = session.snapshot()
        client.post("/cliques", json={"terms": ["gamma", "delta"]})
        # the old snapshot is untouched; readers that grabbed it keep a
        # consistent view, checksum included
        assert "gamma" not in old_snap.space.lexicon
        assert session.snapshot().checksum != old_snap.checksum
        assert "gamma" in session.snapshot().space.lexicon

    def test_concurrent_update_409(self, client):
        session = client.app.state.session
        assert session._update_lock.acquire(blocking=False)
        try:
            resp = client.post("/cliques", json={"terms": ["x1", "x2"]})
            assert resp.status_code == 409
        finally:
            session._update_lock.release()
        assert client.post("/cliques", json={"terms": ["x1", "x2"]}).status_code == 200

    def test_undersized_clique_400(self, client):
        resp = client.post("/cliques", json={"terms": ["solo"]})
        assert resp.status_code == 400

    def test_gets_are_side_effect_free(self, client):
        c1 = client.get("/terms", params={"limit": 1}).json()["checksum"]
        client.get("/neighbors", params={"term": "bank", "k": 3})
        client.get("/clusters", params={"term": "bank"})
        c2 = client.get("/terms", params={"limit": 1}).json()["checksum"]
        assert c1 == c2
