"""HTTP surface: endpoint behavior and equivalence with direct engine calls."""

import pytest
from fastapi.testclient import TestClient

from kgrec import store
from kgrec.classify import (
    KIND_LR,
    fit_vectorizer,
    save_model,
    train,
)
from kgrec.persistence import DurableStore
from kgrec.seed import seed_snapshot_text
from kgrec.service import ServiceConfig, create_app


@pytest.fixture()
def api(tmp_path):
    durable = DurableStore.create(tmp_path / "store", seed_snapshot_text())
    config = ServiceConfig(maintainer_token="root-token")
    app = create_app(durable, config)
    client = TestClient(app)
    return client, durable


def auth(token):
    return {"Authorization": f"Bearer {token}"}


def register(client, cid, background="industry", years=3.0):
    resp = client.post(
        "/contributors", json={"id": cid, "background": background, "years_experience": years}
    )
    assert resp.status_code == 201, resp.text
    return resp.json()


def test_health_and_export(api):
    client, durable = api
    assert client.get("/healthz").json()["topics"] == 72
    text = client.get("/kg/export").text
    assert text == durable.export_snapshot()
    assert text.splitlines()[0].startswith('{"kind": "snapshot"')


def test_vote_flow_reaches_acceptance(api):
    client, durable = api
    verb_id = client.get("/relation-types").json()[0]["id"]
    for name in ("subj-new", "obj-new"):
        resp = client.post(
            "/topics", json={"full_name": name, "origin": "maintainer"}, headers=auth("root-token")
        )
        assert resp.status_code == 201
    subject = client.get("/topics/subj-new").json()["id"]
    obj = client.get("/topics/obj-new").json()["id"]
    resp = client.post(
        "/relationships",
        json={"subject": subject, "verb": verb_id, "object": obj},
        headers=auth("root-token"),
    )
    assert resp.status_code == 201
    rel_id = resp.json()["relationship"]["id"]

    for i in range(3):
        cid = f"voter-{i}"
        register(client, cid)
        assert client.post(f"/relation-types/{verb_id}/read", headers=auth(cid)).status_code == 200
        resp = client.post(f"/relationships/{rel_id}/votes", json={"value": True}, headers=auth(cid))
        assert resp.status_code == 200
    assert resp.json()["state"] == "accepted"
    shown = client.get(f"/relationships/{rel_id}").json()
    assert shown["state"] == "accepted"
    assert shown["tally"]["true_count"] == 3
    # identical state via direct engine inspection
    assert durable.engine.graph.relationships[rel_id].state == store.ACCEPTED


def test_repeated_vote_supersedes(api):
    client, durable = api
    verb_id = client.get("/relation-types").json()[0]["id"]
    client.post("/topics", json={"full_name": "aa-x", "origin": "maintainer"}, headers=auth("root-token"))
    client.post("/topics", json={"full_name": "bb-x", "origin": "maintainer"}, headers=auth("root-token"))
    subject = client.get("/topics/aa-x").json()["id"]
    obj = client.get("/topics/bb-x").json()["id"]
    rel_id = client.post(
        "/relationships",
        json={"subject": subject, "verb": verb_id, "object": obj},
        headers=auth("root-token"),
    ).json()["relationship"]["id"]
    register(client, "flip")
    client.post(f"/relation-types/{verb_id}/read", headers=auth("flip"))
    client.post(f"/relationships/{rel_id}/votes", json={"value": False}, headers=auth("flip"))
    tally = client.post(
        f"/relationships/{rel_id}/votes", json={"value": True}, headers=auth("flip")
    ).json()["tally"]
    assert (tally["true_count"], tally["false_count"]) == (1, 0)


def test_vote_without_verb_read_is_403(api):
    client, _ = api
    verb_id = client.get("/relation-types").json()[0]["id"]
    client.post("/topics", json={"full_name": "vr-a", "origin": "maintainer"}, headers=auth("root-token"))
    client.post("/topics", json={"full_name": "vr-b", "origin": "maintainer"}, headers=auth("root-token"))
    rel_id = client.post(
        "/relationships",
        json={
            "subject": client.get("/topics/vr-a").json()["id"],
            "verb": verb_id,
            "object": client.get("/topics/vr-b").json()["id"],
        },
        headers=auth("root-token"),
    ).json()["relationship"]["id"]
    register(client, "lazy")
    resp = client.post(f"/relationships/{rel_id}/votes", json={"value": True}, headers=auth("lazy"))
    assert resp.status_code == 403
    assert resp.json()["error"] == "VerbUnread"


def test_vote_on_resolved_relationship_is_409(api):
    client, _ = api
    rel = client.get("/relationships?state=accepted").json()[0]
    register(client, "late")
    client.post(f"/relation-types/{rel['verb']}/read", headers=auth("late"))
    resp = client.post(f"/relationships/{rel['id']}/votes", json={"value": True}, headers=auth("late"))
    assert resp.status_code == 409


def test_topic_creation_requires_creator(api):
    client, _ = api
    register(client, "plain")
    resp = client.post("/topics", json={"full_name": "nope"}, headers=auth("plain"))
    assert resp.status_code == 403
    resp = client.post("/topics", json={"full_name": "nope"})
    assert resp.status_code == 403


def test_duplicate_topic_is_409(api):
    client, _ = api
    resp = client.post("/topics", json={"full_name": "django"}, headers=auth("root-token"))
    assert resp.status_code == 409


def test_redundancy_endpoint_for_draft_and_existing(api):
    client, _ = api
    client.post("/topics", json={"full_name": "node-js", "origin": "maintainer"}, headers=auth("root-token"))
    result = client.get("/topics/nodejs/redundancies").json()
    names = [r["full_name"] for r in result["redundancies"]]
    assert "node-js" in names
    assert result["redundancies"][0]["similarity"] >= 0.8
    # existing topic id path excludes itself
    topic_id = client.get("/topics/node-js").json()["id"]
    result = client.get(f"/topics/{topic_id}/redundancies").json()
    assert all(r["topic"] != topic_id for r in result["redundancies"])


def test_metrics_endpoint(api):
    client, _ = api
    metrics = client.get("/metrics/curation").json()
    assert metrics == {"sr": 1.0, "aartr": 1.0, "arocr": 1.0}


def test_contributor_view_roundtrip(api):
    client, _ = api
    register(client, "carol", background="academia", years=5)
    view = client.get("/contributors/carol").json()
    assert view["reliable"] and not view["creator"]
    assert view["votes_cast"] == 0
    assert client.get("/contributors/ghost").status_code == 404


def test_ineligible_registration_rejected(api):
    client, _ = api
    resp = client.post(
        "/contributors", json={"id": "junior", "background": "academia", "years_experience": 1}
    )
    assert resp.status_code == 403


def test_recommend_augment_endpoint(api):
    client, _ = api
    body = {"topics": ["django", "python"], "k": 5}
    result = client.post("/recommend/augment", json=body).json()
    assert not result["failed"]
    names = [r["topic"] for r in result["ranked"]]
    assert "framework" in names and "python" not in names
    scores = [r["score"] for r in result["ranked"]]
    assert scores == sorted(scores, reverse=True)


def test_recommend_full_unknown_model_404(api):
    client, _ = api
    resp = client.post("/recommend/full", json={"text": "some text", "model": "missing"})
    assert resp.status_code == 404


def test_recommend_full_with_registered_model(tmp_path):
    from tests.test_classifier import planted_corpus

    records = planted_corpus(n_labels=4)
    vectorizer = fit_vectorizer(records)
    model = train(KIND_LR, records, vectorizer)
    model_path = tmp_path / "model.json"
    save_model(model_path, model, vectorizer)

    durable = DurableStore.create(tmp_path / "store", seed_snapshot_text())
    with durable.lock:
        g = durable.engine.graph
        verb = next(v for v in g.relation_types.values() if v.verb == "works-with")
        label = g.add_topic("label-0", origin=store.ORIGIN_FEATURED, popularity_count=500)
        django = g.topic_by_name("django")
        g.add_relationship(label.id, verb.id, django.id, state=store.ACCEPTED)
    config = ServiceConfig(model_paths={"default": str(model_path)})
    client = TestClient(create_app(durable, config))
    result = client.post("/recommend/full", json={"text": "tok0 tok0 tok0", "model": "default"}).json()
    topics = [item["topic"] for item in result["items"]]
    assert topics[0] == "label-0"
    assert "django" in topics[3:]
    assert [i["source"] for i in result["items"][:3]] == ["classifier"] * 3


def test_http_state_equals_direct_engine_state(api):
    client, durable = api
    register(client, "mirror")
    verb_id = client.get("/relation-types").json()[0]["id"]
    client.post(f"/relation-types/{verb_id}/read", headers=auth("mirror"))
    via_http = client.get("/kg/export").text

    # replay the same operations directly on a second store
    durable2 = DurableStore.create(durable.directory.parent / "mirror", seed_snapshot_text())
    durable2.register_contributor("mirror", "industry", 3.0)
    durable2.mark_verb_read("mirror", verb_id)
    assert via_http == durable2.export_snapshot()
    assert durable.engine.contributor_view("mirror") == durable2.engine.contributor_view("mirror")


def test_resubmission_of_rejected_is_surfaced(api):
    client, durable = api
    with durable.lock:
        g = durable.engine.graph
        verb = next(iter(g.relation_types.values()))
        a = g.add_topic("dead-a", origin=store.ORIGIN_FEATURED)
        b = g.add_topic("dead-b", origin=store.ORIGIN_FEATURED)
        rel = g.add_relationship(a.id, verb.id, b.id)
        rel.state = store.REJECTED
    resp = client.post(
        "/relationships",
        json={"subject": a.id, "verb": verb.id, "object": b.id},
        headers=auth("root-token"),
    )
    assert resp.status_code == 201
    assert resp.json()["resubmission_of_rejected"] == [rel.id]
