"""Pool-based active-learning loop.

Seed-train on a small labeled subset, then repeatedly: select one
unlabeled row, ask the oracle for its label, retrain from scratch, and
evaluate. The loop is split into propose (pick the next query; consumes
the selection rng) and commit (apply the label and retrain), so an HTTP
session that waits minutes for a human and an offline replay run consume
randomness identically and produce bit-identical traces.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .ensemble import EnsembleModel, EnsembleSpec, train_ensemble
from .learners import ISOLATION_FOREST, LearnerConfig, train as train_learner
from .metrics import MetricsSnapshot, snapshot
from .sampling import STRATEGIES, Pool, select

DEFAULT_N_SEED = 1000
DEFAULT_BUDGET = 100
DEFAULT_CHECKPOINTS = (10, 50, 100)

STATUS_ACTIVE = "active"
STATUS_DONE = "done"

_ISO_CACHE_TAG = 2**20  # seed-stream slot for the one-off score cache


@dataclass(frozen=True)
class LoopConfig:
    learner: LearnerConfig | EnsembleSpec
    strategy: str
    n_seed: int = DEFAULT_N_SEED
    budget: int = DEFAULT_BUDGET
    checkpoints: tuple[int, ...] = DEFAULT_CHECKPOINTS
    seed: int = 0
    tie_tolerance: float = 0.0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(
                f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}"
            )
        if self.n_seed < 1:
            raise ValueError("n_seed must be >= 1")
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
        for c in self.checkpoints:
            if not 1 <= c <= max(self.budget, 1):
                raise ValueError(
                    f"checkpoint {c} outside [1, budget={self.budget}]"
                )

    def to_dict(self) -> dict:
        return {
            "learner": self.learner.to_dict(),
            "strategy": self.strategy,
            "n_seed": self.n_seed,
            "budget": self.budget,
            "checkpoints": list(self.checkpoints),
            "seed": self.seed,
            "tie_tolerance": self.tie_tolerance,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LoopConfig":
        learner_doc = d["learner"]
        if learner_doc.get("kind") == "ensemble":
            learner = EnsembleSpec.from_dict(learner_doc)
        else:
            learner = LearnerConfig.from_dict(learner_doc)
        return cls(
            learner=learner,
            strategy=d["strategy"],
            n_seed=d.get("n_seed", DEFAULT_N_SEED),
            budget=d.get("budget", DEFAULT_BUDGET),
            checkpoints=tuple(d.get("checkpoints", DEFAULT_CHECKPOINTS)),
            seed=d.get("seed", 0),
            tie_tolerance=d.get("tie_tolerance", 0.0),
        )


def derived_seed(loop_seed: int, slot: int) -> int:
    """Model seed for one retrain slot; slot 0 is the seed-set model."""
    return int(np.random.SeedSequence((loop_seed, slot)).generate_state(1)[0])


def _train_for_slot(config: LoopConfig, dataset, slot: int):
    seed = derived_seed(config.seed, slot)
    learner = config.learner.with_seed(seed)
    if isinstance(learner, EnsembleSpec):
        return train_ensemble(learner, dataset)
    return train_learner(learner, dataset)


@dataclass
class ActiveState:
    labeled_idx: np.ndarray  # acquisition order: seed rows, then queries
    labeled_y: np.ndarray
    pool: Pool
    model: object
    queries_used: int
    rng: np.random.Generator
    status: str = STATUS_ACTIVE
    pending: tuple[int, float | None] | None = None  # proposed, not committed

    @property
    def n_labeled(self) -> int:
        return int(self.labeled_idx.shape[0])

    def labeled_dataset(self, train):
        return train.take(self.labeled_idx)


@dataclass(frozen=True)
class QueryEvent:
    query_number: int
    index: int
    score: float | None
    label: int
    retrain_time_s: float
    query_time_s: float
    metrics: MetricsSnapshot

    def to_dict(self, include_timings: bool = True) -> dict:
        c = self.metrics.confusion
        d = {
            "query": self.query_number,
            "index": self.index,
            "score": self.score,
            "label": self.label,
            "f1": self.metrics.f1,
            "precision": self.metrics.precision,
            "recall": self.metrics.recall,
            "tp": c.tp,
            "fp": c.fp,
            "fn": c.fn,
            "tn": c.tn,
        }
        if include_timings:
            d["retrain_time_s"] = self.retrain_time_s
            d["query_time_s"] = self.query_time_s
        return d


class ReplayOracle:
    """Answers with the ground-truth labels of the training split."""

    def __init__(self, y):
        self.y = np.asarray(y)

    def label_for(self, index: int) -> int:
        return int(self.y[index])


class CallbackOracle:
    """Adapts any index -> {0,1} callable (e.g. a blocking prompt)."""

    def __init__(self, fn):
        self.fn = fn

    def label_for(self, index: int) -> int:
        return int(self.fn(index))


def initialize(config: LoopConfig, train) -> ActiveState:
    """Draw and auto-label the seed set, train the first model.

    Seed labels are free: the query budget only counts oracle calls.
    A seed set may contain zero positives at low prevalence; the model
    then trains single-class and the first dev F1 is 0 by construction.
    """
    n = len(train)
    if n < config.n_seed:
        raise ValueError(f"train split has {n} rows < n_seed={config.n_seed}")
    rng = np.random.default_rng(config.seed)
    seed_idx = rng.choice(n, size=config.n_seed, replace=False).astype(np.int64)
    mask = np.ones(n, dtype=bool)
    mask[seed_idx] = False
    candidates = np.flatnonzero(mask).astype(np.int64)

    anomaly_scores = None
    if config.strategy == "isolation":
        iso_cfg = LearnerConfig(
            ISOLATION_FOREST, seed=derived_seed(config.seed, _ISO_CACHE_TAG)
        )
        from .learners.isolation import train_isolation

        pool_X = train.X[candidates]
        iso = train_isolation(iso_cfg, pool_X, train.feature_names)
        anomaly_scores = np.full(n, np.nan)
        anomaly_scores[candidates] = iso.anomaly_score(train.X[candidates])

    pool = Pool(train.X, candidates, anomaly_scores)
    labeled_y = train.y[seed_idx].astype(np.int8)
    model = _train_for_slot(config, train.take(seed_idx), 0)
    status = STATUS_ACTIVE if config.budget > 0 and len(pool) > 0 else STATUS_DONE
    return ActiveState(
        labeled_idx=seed_idx,
        labeled_y=labeled_y,
        pool=pool,
        model=model,
        queries_used=0,
        rng=rng,
        status=status,
    )


def propose(config: LoopConfig, state: ActiveState) -> tuple[int, float | None]:
    """Select the next row to query; does not touch the labeled set.

    Consumes the selection rng, so call exactly once per query; the
    proposal is parked on the state until committed.
    """
    if state.status == STATUS_DONE:
        raise RuntimeError("loop is done; no further queries")
    if state.pending is not None:
        return state.pending
    index, score = select(
        config.strategy, state.model, state.pool, state.rng, config.tie_tolerance
    )
    state.pending = (index, score)
    return state.pending


def commit(config: LoopConfig, state: ActiveState, train, index: int, label: int) -> float:
    """Apply one oracle label and retrain from scratch; returns retrain seconds."""
    if state.status == STATUS_DONE:
        raise RuntimeError("loop is done; no further labels accepted")
    if state.pending is None or state.pending[0] != index:
        raise ValueError(f"index {index} is not the pending query")
    if label not in (0, 1):
        raise ValueError("label must be 0 or 1")
    state.pool = state.pool.without(index)
    state.labeled_idx = np.append(state.labeled_idx, np.int64(index))
    state.labeled_y = np.append(state.labeled_y, np.int8(label))
    state.queries_used += 1
    state.pending = None
    t0 = time.perf_counter()
    state.model = _train_for_slot(
        config, train.take(state.labeled_idx), state.queries_used
    )
    retrain_time = time.perf_counter() - t0
    if state.queries_used >= config.budget or len(state.pool) == 0:
        state.status = STATUS_DONE
    return retrain_time


def evaluate(state: ActiveState, dev) -> MetricsSnapshot:
    return snapshot(state.model.classify(dev.X), dev.y)


def step(config: LoopConfig, state: ActiveState, train, dev, oracle):
    """One full query round; returns (state, QueryEvent or None).

    A done loop refuses further work by returning the state unchanged
    with no event, matching the budget contract.
    """
    if state.status == STATUS_DONE:
        return state, None
    t0 = time.perf_counter()
    index, score = propose(config, state)
    query_time = time.perf_counter() - t0
    label = oracle.label_for(index)
    retrain_time = commit(config, state, train, index, label)
    event = QueryEvent(
        query_number=state.queries_used,
        index=int(index),
        score=score,
        label=int(label),
        retrain_time_s=retrain_time,
        query_time_s=query_time,
        metrics=evaluate(state, dev),
    )
    return state, event


@dataclass
class Trace:
    config: LoopConfig
    initial: MetricsSnapshot
    events: list[QueryEvent] = field(default_factory=list)

    def f1_at(self, checkpoint: int) -> float:
        """Dev F1 after `checkpoint` queries (0 = initial model).

        If the pool ran dry early, the last available event answers for
        any later checkpoint."""
        if checkpoint == 0:
            return self.initial.f1
        if not self.events:
            return self.initial.f1
        for ev in self.events:
            if ev.query_number == checkpoint:
                return ev.metrics.f1
        if checkpoint > self.events[-1].query_number:
            return self.events[-1].metrics.f1
        raise KeyError(f"no event at query {checkpoint}")

    def checkpoint_f1s(self) -> dict[int, float]:
        out = {0: self.initial.f1}
        for c in self.config.checkpoints:
            out[c] = self.f1_at(c)
        return out

    def curve(self) -> list[tuple[int, float]]:
        pts = [(0, self.initial.f1)]
        pts.extend((ev.query_number, ev.metrics.f1) for ev in self.events)
        return pts

    def mean_retrain_time(self) -> float:
        if not self.events:
            return 0.0
        return float(np.mean([ev.retrain_time_s for ev in self.events]))

    def mean_query_time(self) -> float:
        if not self.events:
            return 0.0
        return float(np.mean([ev.query_time_s for ev in self.events]))

    def canonical_events(self) -> list[dict]:
        """Events without wall-clock fields; basis for equivalence checks."""
        return [ev.to_dict(include_timings=False) for ev in self.events]

    def save_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for ev in self.events:
                fh.write(json.dumps(ev.to_dict()) + "\n")

    def summary_dict(self) -> dict:
        c = self.initial.confusion
        return {
            "config": self.config.to_dict(),
            "initial": {
                "f1": self.initial.f1,
                "precision": self.initial.precision,
                "recall": self.initial.recall,
                "tp": c.tp,
                "fp": c.fp,
                "fn": c.fn,
                "tn": c.tn,
            },
            "checkpoint_f1": {str(k): v for k, v in self.checkpoint_f1s().items()},
            "queries_used": len(self.events),
            "mean_retrain_time_s": self.mean_retrain_time(),
            "mean_query_time_s": self.mean_query_time(),
        }

    def save_summary(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.summary_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def run(config: LoopConfig, splits, oracle=None) -> Trace:
    """Initialize, then step to budget or pool exhaustion.

    With the default replay oracle (ground truth from the train split)
    the whole trace is a deterministic function of (config, data).
    """
    train, dev = splits.train, splits.dev
    if oracle is None:
        oracle = ReplayOracle(train.y)
    state = initialize(config, train)
    trace = Trace(config=config, initial=evaluate(state, dev))
    while state.status != STATUS_DONE:
        state, event = step(config, state, train, dev, oracle)
        if event is None:
            break
        trace.events.append(event)
    return trace
