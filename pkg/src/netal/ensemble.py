"""Weighted indicator-vote ensemble over heterogeneous classifiers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .learners import (
    ISOLATION_FOREST,
    IsolationModel,
    LearnerConfig,
    train as train_learner,
)

ENSEMBLE = "ensemble"


@dataclass(frozen=True)
class EnsembleSpec:
    """Untrained recipe: member learner configs with vote weights."""

    members: tuple[tuple[LearnerConfig, float], ...]

    def __post_init__(self):
        if not self.members:
            raise ValueError("ensemble needs at least one member")
        if any(w < 0 for _, w in self.members):
            raise ValueError("weights must be nonnegative")
        if not any(w > 0 for _, w in self.members):
            raise ValueError("at least one weight must be strictly positive")

    kind = ENSEMBLE

    @classmethod
    def equal_weights(cls, kinds, **config_kwargs) -> "EnsembleSpec":
        return cls(tuple((LearnerConfig(k, **config_kwargs), 1.0) for k in kinds))

    def with_seed(self, seed: int) -> "EnsembleSpec":
        return EnsembleSpec(
            tuple((cfg.with_seed(seed), w) for cfg, w in self.members)
        )

    def to_dict(self) -> dict:
        return {
            "kind": ENSEMBLE,
            "members": [
                {"config": cfg.to_dict(), "weight": w} for cfg, w in self.members
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleSpec":
        return cls(
            tuple(
                (LearnerConfig.from_dict(m["config"]), float(m["weight"]))
                for m in d["members"]
            )
        )


class EnsembleModel:
    """Trained members with weights; classification is the weighted
    indicator vote: 1 iff sum(w_e * vote_e) > sum(w_e)/2, strictly.
    A tied weighted vote therefore yields 0."""

    kind = ENSEMBLE

    def __init__(self, members: list[tuple[object, float]]):
        if not members:
            raise ValueError("ensemble needs at least one member")
        weights = np.array([w for _, w in members], dtype=np.float64)
        if (weights < 0).any():
            raise ValueError("weights must be nonnegative")
        if weights.sum() <= 0:
            raise ValueError("all ensemble weights are zero")
        d = members[0][0].n_features
        for model, _ in members:
            if model.n_features != d:
                raise ValueError("ensemble members disagree on feature count")
        self.members = list(members)
        self.weights = weights
        self.feature_names = list(members[0][0].feature_names)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def member_votes(self, X) -> np.ndarray:
        """Binary vote per member; isolation members vote on anomaly score."""
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        rows = X.reshape(1, -1) if single else X
        votes = np.empty((len(self.members), rows.shape[0]), dtype=np.int8)
        for e, (model, _) in enumerate(self.members):
            votes[e] = np.asarray(model.classify(rows), dtype=np.int8)
        return votes[:, 0] if single else votes

    def classify(self, X, threshold: float = 0.5):
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        rows = X.reshape(1, -1) if single else X
        votes = self.member_votes(rows)
        total = self.weights.sum()
        weighted = self.weights @ votes
        out = (weighted > total / 2.0).astype(np.int8)
        return int(out[0]) if single else out

    def predict_proba(self, X):
        """Weight-averaged member probability, used only as a pool score
        for sampling strategies (classification stays the indicator
        vote). Isolation members contribute their anomaly score."""
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        rows = X.reshape(1, -1) if single else X
        total = self.weights.sum()
        acc = np.zeros(rows.shape[0])
        for (model, w) in self.members:
            if w == 0:
                continue
            if isinstance(model, IsolationModel):
                acc += w * np.asarray(model.anomaly_score(rows))
            else:
                acc += w * np.asarray(model.predict_proba(rows))
        p = acc / total
        return float(p[0]) if single else p

    def to_dict(self) -> dict:
        from .learners import model_to_dict

        return {
            "kind": ENSEMBLE,
            "members": [
                {"model": model_to_dict(m), "weight": w} for m, w in self.members
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleModel":
        from .learners import model_from_dict

        return cls(
            [(model_from_dict(m["model"]), float(m["weight"])) for m in d["members"]]
        )


def train_ensemble(spec: EnsembleSpec, dataset) -> EnsembleModel:
    return EnsembleModel(
        [(train_learner(cfg, dataset), w) for cfg, w in spec.members]
    )


def ensemble_classify(model: EnsembleModel, rows):
    """1 iff the weighted member votes strictly exceed half the weight."""
    return model.classify(rows)


def default_ensemble_spec(seed: int = 0) -> EnsembleSpec:
    """Equal-weight RF + GB + LR + IF."""
    return EnsembleSpec.equal_weights(
        ["random_forest", "gradient_boosting", "logistic", "isolation_forest"],
        seed=seed,
    )
