"""HTTP facade for interactive labeling sessions.

One session = one active-learning loop driven by a human (or a test)
instead of the replay oracle. The loop's propose/commit split maps onto
GET query / POST label, so a session fed ground-truth labels produces
the exact event stream of the offline replay run with the same seed.

Sessions persist to disk after every label and are rebuilt on demand by
re-running the deterministic loop against the stored label history, so
a service restart costs at most a few seconds of retraining.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .dataset import TRAIN_FRACTION
from .ensemble import EnsembleModel
from .experiments import (
    PreparedDataset,
    discover_prepared,
    load_prepared,
    make_learner,
)
from .kdd import FEATURE_NAMES
from .learners import ForestModel, LogisticModel
from .loop import (
    ActiveState,
    LoopConfig,
    QueryEvent,
    STATUS_DONE,
    commit,
    evaluate,
    initialize,
    propose,
)
from .metrics import feature_z_scores
from .sampling import STRATEGIES

SCHEMA = "netal-service-v1"

SERVICE_LEARNERS = ("logistic", "random_forest", "gradient_boosting", "ensemble")

AWAITING = "awaiting_label"
RETRAINING = "retraining"
DONE = "done"

LABEL_NAMES = {"normal": 0, "attack": 1}


class CreateSessionRequest(BaseModel):
    dataset: str
    learner: str = "random_forest"
    strategy: str = "entropy"
    seed: int = 0
    budget: int = 100
    n_seed: int = 1000
    checkpoints: list[int] | None = None
    tie_tolerance: float = 0.0
    replay_assist: bool = True


class LabelRequest(BaseModel):
    query_number: int
    label: str


@dataclass
class Session:
    session_id: str
    dataset: str
    config: LoopConfig
    replay_assist: bool
    pd: PreparedDataset
    state: ActiveState
    initial_metrics: object
    events: list[QueryEvent] = field(default_factory=list)
    pending: dict | None = None  # {"query_number", "index", "score"}
    status: str = AWAITING
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def queries_remaining(self) -> int:
        return self.config.budget - self.state.queries_used


def _loop_config(req: CreateSessionRequest) -> LoopConfig:
    if req.learner not in SERVICE_LEARNERS:
        raise ValueError(
            f"unknown learner {req.learner!r}; expected one of {SERVICE_LEARNERS}"
        )
    if req.strategy not in STRATEGIES:
        raise ValueError(
            f"unknown strategy {req.strategy!r}; expected one of {STRATEGIES}"
        )
    if req.checkpoints is None:
        checkpoints = tuple(c for c in (10, 50, 100) if c <= req.budget)
    else:
        checkpoints = tuple(req.checkpoints)
    return LoopConfig(
        learner=make_learner(req.learner),
        strategy=req.strategy,
        n_seed=req.n_seed,
        budget=req.budget,
        checkpoints=checkpoints,
        seed=req.seed,
        tie_tolerance=req.tie_tolerance,
    )


def _train_record_indices(pd: PreparedDataset) -> np.ndarray:
    """Row index in the stored records for each train-split row.

    Mirrors the dataset split exactly: same seeded permutation, floor
    train and dev sizes."""
    n = len(pd.records)
    order = np.random.default_rng(pd.split_seed).permutation(n)
    return order[: int(np.floor(TRAIN_FRACTION * n))]


def _decoded_features(pd: PreparedDataset, record_idx: int) -> dict:
    rec = pd.records[record_idx]
    out = {}
    for name in FEATURE_NAMES:
        v = getattr(rec, name)
        if isinstance(v, float):
            if np.isnan(v):
                out[name] = None
            elif v == int(v):
                out[name] = int(v)
            else:
                out[name] = v
        else:
            out[name] = v
    return out


def _importances(model, feature_names) -> list[dict] | None:
    """Per-feature weights for models that expose them, largest first."""
    if isinstance(model, ForestModel):
        pairs = model.feature_importance()
        names = [n for n, _ in pairs]
        w = np.array([v for _, v in pairs])
    elif isinstance(model, LogisticModel):
        raw = np.abs(model.weights)
        total = raw.sum()
        w = raw / total if total > 0 else np.full(raw.shape, 1.0 / raw.size)
        names = list(feature_names)
    else:
        return None
    order = np.argsort(-w)
    return [{"feature": names[i], "weight": float(w[i])} for i in order]


def _metrics_doc(m) -> dict:
    c = m.confusion
    return {
        "f1": m.f1,
        "precision": m.precision,
        "recall": m.recall,
        "tp": c.tp,
        "fp": c.fp,
        "fn": c.fn,
        "tn": c.tn,
    }


class SessionStore:
    """Owns datasets, live sessions, and their on-disk mirrors."""

    def __init__(self, data_dir, state_dir):
        self.data_dir = Path(data_dir)
        self.state_dir = Path(state_dir)
        self.state_dir.mkdir(parents=True, exist_ok=True)
        self.dataset_dirs = {d.name: d for d in discover_prepared(self.data_dir)}
        self._datasets: dict[str, PreparedDataset] = {}
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def dataset(self, name: str) -> PreparedDataset:
        with self._lock:
            if name not in self._datasets:
                if name not in self.dataset_dirs:
                    raise KeyError(name)
                self._datasets[name] = load_prepared(
                    self.dataset_dirs[name], keep_records=True
                )
            return self._datasets[name]

    # -- persistence ------------------------------------------------------

    def _path(self, session_id: str) -> Path:
        return self.state_dir / f"{session_id}.json"

    def save(self, session: Session) -> None:
        doc = {
            "schema": SCHEMA,
            "session_id": session.session_id,
            "dataset": session.dataset,
            "replay_assist": session.replay_assist,
            "loop_config": session.config.to_dict(),
            "status": session.status,
            "pending": session.pending,
            "events": [ev.to_dict(include_timings=False) for ev in session.events],
        }
        tmp = self._path(session.session_id).with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, self._path(session.session_id))

    def _rebuild(self, doc: dict) -> Session:
        """Replay the stored label history through a fresh loop.

        Every proposal is deterministic given (config, data), so the
        indices must come back in the stored order; a mismatch means the
        dataset changed under the session."""
        pd = self.dataset(doc["dataset"])
        config = LoopConfig.from_dict(doc["loop_config"])
        state = initialize(config, pd.splits.train)
        initial = evaluate(state, pd.splits.dev)
        events = []
        for ev in doc["events"]:
            index, score = propose(config, state)
            if index != ev["index"]:
                raise RuntimeError(
                    f"stored history diverged at query {ev['query']}: "
                    f"proposed index {index}, stored {ev['index']}"
                )
            commit(config, state, pd.splits.train, index, ev["label"])
            events.append(
                QueryEvent(
                    query_number=ev["query"],
                    index=ev["index"],
                    score=ev["score"],
                    label=ev["label"],
                    retrain_time_s=0.0,
                    query_time_s=0.0,
                    metrics=evaluate(state, pd.splits.dev),
                )
            )
        session = Session(
            session_id=doc["session_id"],
            dataset=doc["dataset"],
            config=config,
            replay_assist=doc["replay_assist"],
            pd=pd,
            state=state,
            initial_metrics=initial,
            events=events,
            status=doc["status"],
        )
        if session.status == AWAITING:
            index, score = propose(config, state)
            session.pending = {
                "query_number": state.queries_used + 1,
                "index": int(index),
                "score": score,
            }
            stored = doc.get("pending")
            if stored and stored["index"] != session.pending["index"]:
                raise RuntimeError("stored pending query diverged on rebuild")
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            if session_id in self._sessions:
                return self._sessions[session_id]
        path = self._path(session_id)
        if not path.exists():
            raise KeyError(session_id)
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        session = self._rebuild(doc)
        with self._lock:
            # a racing rebuild may have won; keep the first one in
            return self._sessions.setdefault(session_id, session)

    def add(self, session: Session) -> None:
        with self._lock:
            self._sessions[session.session_id] = session
        self.save(session)

    @property
    def session_count(self) -> int:
        return len(self._sessions)


def _query_doc(session: Session) -> dict | None:
    if session.pending is None:
        return None
    pd = session.pd
    train_records = _train_record_indices(pd)
    idx = session.pending["index"]
    row = pd.splits.train.X[idx]
    model = session.state.model
    if isinstance(model, EnsembleModel) or not hasattr(model, "predict_proba"):
        prob = None
    else:
        try:
            prob = float(model.predict_proba(row))
        except TypeError:
            prob = None
    imp = _importances(model, pd.splits.train.feature_names)
    doc = {
        "query_number": session.pending["query_number"],
        "record_index": int(idx),
        "features": _decoded_features(pd, int(train_records[idx])),
        "model_probability": prob,
        "strategy": session.config.strategy,
        "strategy_score": session.pending["score"],
        "queries_remaining": session.queries_remaining,
        "top_importances": imp[:10] if imp else None,
    }
    if session.replay_assist:
        truth = int(pd.splits.train.y[idx])
        doc["true_label"] = "attack" if truth else "normal"
    return doc


def create_app(data_dir, state_dir) -> FastAPI:
    store = SessionStore(data_dir, state_dir)
    app = FastAPI(title="netal label service")
    app.state.store = store

    def _session_or_404(session_id: str) -> Session:
        try:
            return store.get(session_id)
        except KeyError:
            raise HTTPException(404, f"unknown session {session_id!r}")

    @app.get("/health")
    def health():
        return {
            "schema": SCHEMA,
            "status": "ok",
            "datasets": sorted(store.dataset_dirs),
            "sessions": store.session_count,
        }

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        try:
            pd = store.dataset(req.dataset)
        except KeyError:
            raise HTTPException(
                400,
                f"unknown dataset {req.dataset!r}; "
                f"available: {sorted(store.dataset_dirs)}",
            )
        try:
            config = _loop_config(req)
            state = initialize(config, pd.splits.train)
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        session = Session(
            session_id=uuid.uuid4().hex,
            dataset=req.dataset,
            config=config,
            replay_assist=req.replay_assist,
            pd=pd,
            state=state,
            initial_metrics=evaluate(state, pd.splits.dev),
        )
        if state.status == STATUS_DONE:
            session.status = DONE
        else:
            index, score = propose(config, state)
            session.pending = {
                "query_number": 1,
                "index": int(index),
                "score": score,
            }
        store.add(session)
        return {
            "schema": SCHEMA,
            "session_id": session.session_id,
            "dataset": session.dataset,
            "status": session.status,
            "queries_remaining": session.queries_remaining,
            "initial": _metrics_doc(session.initial_metrics)
            if session.replay_assist
            else None,
            "query": _query_doc(session),
        }

    @app.get("/sessions/{session_id}/query")
    def next_query(session_id: str):
        session = _session_or_404(session_id)
        with session.lock:
            if session.status == DONE:
                raise HTTPException(410, "session is done; budget exhausted")
            return {
                "schema": SCHEMA,
                "session_id": session.session_id,
                "status": session.status,
                "query": _query_doc(session)
                if session.status == AWAITING
                else None,
            }

    @app.post("/sessions/{session_id}/label")
    def submit_label(session_id: str, req: LabelRequest):
        if req.label not in LABEL_NAMES:
            raise HTTPException(
                422, f"label must be one of {sorted(LABEL_NAMES)}"
            )
        session = _session_or_404(session_id)
        with session.lock:
            if session.status == DONE:
                raise HTTPException(410, "session is done; budget exhausted")
            if session.status == RETRAINING or session.pending is None:
                raise HTTPException(409, "a retrain is in progress; retry shortly")
            if req.query_number != session.pending["query_number"]:
                raise HTTPException(
                    409,
                    f"stale query number {req.query_number}; "
                    f"pending is {session.pending['query_number']}",
                )
            pending = session.pending
            session.pending = None
            session.status = RETRAINING
        # the retrain runs outside the lock so readers stay responsive;
        # the RETRAINING status bars any competing writer until we finish
        label01 = LABEL_NAMES[req.label]
        retrain_s = commit(
            session.config,
            session.state,
            session.pd.splits.train,
            pending["index"],
            label01,
        )
        event = QueryEvent(
            query_number=session.state.queries_used,
            index=pending["index"],
            score=pending["score"],
            label=label01,
            retrain_time_s=retrain_s,
            query_time_s=0.0,
            metrics=evaluate(session.state, session.pd.splits.dev),
        )
        with session.lock:
            session.events.append(event)
            if session.state.status == STATUS_DONE:
                session.status = DONE
            else:
                index, score = propose(session.config, session.state)
                session.pending = {
                    "query_number": session.state.queries_used + 1,
                    "index": int(index),
                    "score": score,
                }
                session.status = AWAITING
            store.save(session)
            return {
                "schema": SCHEMA,
                "session_id": session.session_id,
                "status": session.status,
                "recorded": {
                    "query_number": event.query_number,
                    "record_index": event.index,
                    "label": req.label,
                },
                "metrics": _metrics_doc(event.metrics)
                if session.replay_assist
                else None,
                "queries_remaining": session.queries_remaining,
                "query": _query_doc(session),
            }

    @app.get("/sessions/{session_id}/metrics")
    def session_metrics(session_id: str):
        session = _session_or_404(session_id)
        with session.lock:
            doc = {
                "schema": SCHEMA,
                "session_id": session.session_id,
                "dataset": session.dataset,
                "status": session.status,
                "learner": session.config.learner.kind,
                "strategy": session.config.strategy,
                "labels_given": len(session.events),
                "queries_remaining": session.queries_remaining,
                "feature_importances": _importances(
                    session.state.model, session.pd.splits.train.feature_names
                ),
                "initial": None,
                "f1_curve": None,
                "events": None,
                "zscore": None,
            }
            if session.replay_assist:
                doc["initial"] = _metrics_doc(session.initial_metrics)
                curve = [[0, session.initial_metrics.f1]]
                curve += [
                    [ev.query_number, ev.metrics.f1] for ev in session.events
                ]
                doc["f1_curve"] = curve
                doc["events"] = [
                    ev.to_dict(include_timings=False) for ev in session.events
                ]
                report = feature_z_scores(session.state.model, session.pd.splits.dev)
                doc["zscore"] = report.to_dict()
            return doc

    return app
