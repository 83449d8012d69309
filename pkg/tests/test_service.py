import pytest
from fastapi.testclient import TestClient

from netal.experiments import load_prepared, make_learner
from netal.kdd import FEATURE_NAMES
from netal.loop import LoopConfig, run
from netal.service import create_app


@pytest.fixture(scope="module")
def svc(small_data_dir, tmp_path_factory):
    state = tmp_path_factory.mktemp("state")
    app = create_app(small_data_dir, state)
    return TestClient(app), state


def _create(client, **overrides):
    body = dict(
        dataset="neptune",
        learner="random_forest",
        strategy="entropy",
        seed=0,
        budget=4,
        n_seed=60,
    )
    body.update(overrides)
    r = client.post("/sessions", json=body)
    assert r.status_code == 201, r.text
    return r.json()


def test_health(svc, small_data_dir):
    client, _ = svc
    r = client.get("/health")
    assert r.status_code == 200
    doc = r.json()
    assert doc["status"] == "ok"
    assert doc["datasets"] == ["neptune", "smurf"]


def test_create_session_rejects_bad_input(svc):
    client, _ = svc
    r = client.post("/sessions", json={"dataset": "slammer"})
    assert r.status_code == 400
    assert "slammer" in r.json()["detail"]
    r = client.post("/sessions", json={"dataset": "neptune", "learner": "svm"})
    assert r.status_code == 400
    r = client.post("/sessions", json={"dataset": "neptune", "strategy": "margin"})
    assert r.status_code == 400
    r = client.post("/sessions", json={"dataset": "neptune", "n_seed": 10**7})
    assert r.status_code == 400


def test_create_session_initial_shape(svc):
    client, _ = svc
    doc = _create(client)
    assert doc["status"] == "awaiting_label"
    assert doc["queries_remaining"] == 4
    assert set(doc["initial"]) == {"f1", "precision", "recall",
                                   "tp", "fp", "fn", "tn"}
    q = doc["query"]
    assert q["query_number"] == 1
    assert q["strategy"] == "entropy"
    assert 0.0 <= q["strategy_score"] <= 1.0
    assert 0.0 <= q["model_probability"] <= 1.0
    assert set(q["features"]) == set(FEATURE_NAMES)
    assert isinstance(q["features"]["protocol_type"], str)
    assert isinstance(q["features"]["src_bytes"], int)
    assert q["true_label"] in ("normal", "attack")
    assert len(q["top_importances"]) == 10


def test_query_endpoint_is_stable(svc):
    client, _ = svc
    doc = _create(client)
    sid = doc["session_id"]
    q1 = client.get(f"/sessions/{sid}/query").json()["query"]
    q2 = client.get(f"/sessions/{sid}/query").json()["query"]
    assert q1 == q2 == doc["query"]


def test_unknown_session_404(svc):
    client, _ = svc
    assert client.get("/sessions/feedbeef/query").status_code == 404
    assert client.get("/sessions/feedbeef/metrics").status_code == 404
    r = client.post("/sessions/feedbeef/label",
                    json={"query_number": 1, "label": "normal"})
    assert r.status_code == 404


def test_label_validation(svc):
    client, _ = svc
    sid = _create(client)["session_id"]
    r = client.post(f"/sessions/{sid}/label",
                    json={"query_number": 1, "label": "maybe"})
    assert r.status_code == 422
    r = client.post(f"/sessions/{sid}/label",
                    json={"query_number": 7, "label": "normal"})
    assert r.status_code == 409
    assert "stale" in r.json()["detail"]


def test_full_session_lifecycle(svc):
    client, _ = svc
    doc = _create(client)
    sid = doc["session_id"]
    seen = []
    for k in range(1, 5):
        q = doc["query"]
        assert q["query_number"] == k
        seen.append(q["record_index"])
        r = client.post(
            f"/sessions/{sid}/label",
            json={"query_number": k, "label": q["true_label"]},
        )
        assert r.status_code == 200, r.text
        doc = r.json()
        assert doc["recorded"]["query_number"] == k
        assert doc["recorded"]["record_index"] == q["record_index"]
        assert doc["queries_remaining"] == 4 - k
        assert set(doc["metrics"]) >= {"f1", "tp", "fn"}
    assert doc["status"] == "done"
    assert doc["query"] is None
    assert len(set(seen)) == 4  # no row queried twice

    assert client.get(f"/sessions/{sid}/query").status_code == 410
    r = client.post(f"/sessions/{sid}/label",
                    json={"query_number": 5, "label": "normal"})
    assert r.status_code == 410

    m = client.get(f"/sessions/{sid}/metrics").json()
    assert m["labels_given"] == 4
    assert m["queries_remaining"] == 0
    assert m["status"] == "done"


def test_double_submit_increments_once(svc):
    client, _ = svc
    doc = _create(client)
    sid = doc["session_id"]
    q = doc["query"]
    body = {"query_number": 1, "label": q["true_label"]}
    r1 = client.post(f"/sessions/{sid}/label", json=body)
    assert r1.status_code == 200
    r2 = client.post(f"/sessions/{sid}/label", json=body)
    assert r2.status_code == 409
    m = client.get(f"/sessions/{sid}/metrics").json()
    assert m["labels_given"] == 1
    assert m["queries_remaining"] == 3


def test_budget_zero_session_is_born_done(svc):
    client, _ = svc
    doc = _create(client, budget=0)
    assert doc["status"] == "done"
    assert doc["query"] is None
    sid = doc["session_id"]
    assert client.get(f"/sessions/{sid}/query").status_code == 410
    m = client.get(f"/sessions/{sid}/metrics").json()
    assert m["labels_given"] == 0


def test_non_replay_sessions_hide_ground_truth(svc):
    client, _ = svc
    doc = _create(client, replay_assist=False)
    assert doc["initial"] is None
    assert "true_label" not in doc["query"]
    sid = doc["session_id"]
    r = client.post(f"/sessions/{sid}/label",
                    json={"query_number": 1, "label": "attack"})
    assert r.status_code == 200
    assert r.json()["metrics"] is None
    m = client.get(f"/sessions/{sid}/metrics").json()
    assert m["initial"] is None
    assert m["f1_curve"] is None
    assert m["events"] is None
    assert m["zscore"] is None
    assert m["labels_given"] == 1
    assert m["feature_importances"] is not None


def test_metrics_replay_fields(svc):
    client, _ = svc
    doc = _create(client)
    sid = doc["session_id"]
    client.post(f"/sessions/{sid}/label",
                json={"query_number": 1, "label": doc["query"]["true_label"]})
    m = client.get(f"/sessions/{sid}/metrics").json()
    assert m["initial"]["f1"] == doc["initial"]["f1"]
    assert len(m["f1_curve"]) == 2
    assert m["f1_curve"][0] == [0, doc["initial"]["f1"]]
    assert len(m["events"]) == 1
    assert m["events"][0]["query"] == 1
    assert "retrain_time_s" not in m["events"][0]
    assert m["zscore"] is not None and "features" in m["zscore"]
    imp = m["feature_importances"]
    weights = [e["weight"] for e in imp]
    assert weights == sorted(weights, reverse=True)
    assert sum(weights) == pytest.approx(1.0)


def test_ground_truth_session_matches_offline_replay(svc, small_data_dir):
    # feeding back each query's true label reproduces, event for event,
    # the offline ground-truth replay with the same loop parameters
    client, _ = svc
    doc = _create(client, seed=3)
    sid = doc["session_id"]
    while doc["status"] == "awaiting_label":
        q = doc["query"]
        doc = client.post(
            f"/sessions/{sid}/label",
            json={"query_number": q["query_number"], "label": q["true_label"]},
        ).json()
    served = client.get(f"/sessions/{sid}/metrics").json()["events"]

    pd = load_prepared(small_data_dir / "neptune")
    cfg = LoopConfig(
        learner=make_learner("random_forest"),
        strategy="entropy",
        n_seed=60,
        budget=4,
        checkpoints=(),
        seed=3,
    )
    offline = run(cfg, pd.splits).canonical_events()
    assert served == offline


def test_restart_rebuilds_sessions(svc, small_data_dir):
    client, state = svc
    doc = _create(client)
    sid = doc["session_id"]
    for k in (1, 2):
        q = doc["query"]
        doc = client.post(
            f"/sessions/{sid}/label",
            json={"query_number": k, "label": q["true_label"]},
        ).json()
    before = client.get(f"/sessions/{sid}/metrics").json()
    next_q = doc["query"]

    fresh = TestClient(create_app(small_data_dir, state))
    after = fresh.get(f"/sessions/{sid}/metrics").json()
    assert after["labels_given"] == 2
    assert after["events"] == before["events"]
    assert after["f1_curve"] == before["f1_curve"]
    # the pending proposal comes back identical, so labeling can resume
    q = fresh.get(f"/sessions/{sid}/query").json()["query"]
    assert q["record_index"] == next_q["record_index"]
    assert q["query_number"] == 3
    r = fresh.post(f"/sessions/{sid}/label",
                   json={"query_number": 3, "label": q["true_label"]})
    assert r.status_code == 200


def test_rebuild_detects_dataset_divergence(svc, small_data_dir, tmp_path):
    # hand-corrupt a stored session so its history cannot replay
    client, state = svc
    doc = _create(client)
    sid = doc["session_id"]
    q = doc["query"]
    client.post(f"/sessions/{sid}/label",
                json={"query_number": 1, "label": q["true_label"]})
    path = state / f"{sid}.json"
    text = path.read_text().replace(
        f'"index": {q["record_index"]}', f'"index": {q["record_index"] + 1}'
    )
    path.write_text(text)
    fresh = TestClient(create_app(small_data_dir, state), raise_server_exceptions=False)
    assert fresh.get(f"/sessions/{sid}/metrics").status_code == 500
