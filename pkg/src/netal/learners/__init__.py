"""Native learners behind one train/predict abstraction.

Four kinds: logistic regression, random forest, gradient boosting, and
isolation forest. All are deterministic functions of (config, data).
Models serialize to self-describing JSON documents.
"""

from __future__ import annotations

import json

import numpy as np

from .boosting import BoostedModel, train_boosting
from .config import (
    GRADIENT_BOOSTING,
    ISOLATION_FOREST,
    KINDS,
    LOGISTIC,
    RANDOM_FOREST,
    SUPERVISED_KINDS,
    LearnerConfig,
)
from .forest import ForestModel, train_forest
from .isolation import IsolationModel, c_factor, harmonic, train_isolation
from .linear import LogisticModel, train_logistic

__all__ = [
    "LearnerConfig",
    "KINDS",
    "SUPERVISED_KINDS",
    "LOGISTIC",
    "RANDOM_FOREST",
    "GRADIENT_BOOSTING",
    "ISOLATION_FOREST",
    "LogisticModel",
    "ForestModel",
    "BoostedModel",
    "IsolationModel",
    "train",
    "predict_proba",
    "classify",
    "anomaly_score",
    "feature_importance",
    "c_factor",
    "harmonic",
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
]

_MODEL_CLASSES = {
    LOGISTIC: LogisticModel,
    RANDOM_FOREST: ForestModel,
    GRADIENT_BOOSTING: BoostedModel,
    ISOLATION_FOREST: IsolationModel,
}


def train(config: LearnerConfig, dataset):
    """Train a model of config.kind on an encoded dataset.

    Single-class data is not an error: supervised models then predict
    that class's prior everywhere. Empty data is an error.
    """
    if len(dataset) == 0:
        raise ValueError("cannot train on an empty dataset")
    if dataset.X.shape[1] < 1:
        raise ValueError("need at least one feature")
    if config.kind == LOGISTIC:
        return train_logistic(config, dataset.X, dataset.y, dataset.feature_names)
    if config.kind == RANDOM_FOREST:
        return train_forest(config, dataset.X, dataset.y, dataset.feature_names)
    if config.kind == GRADIENT_BOOSTING:
        return train_boosting(config, dataset.X, dataset.y, dataset.feature_names)
    if config.kind == ISOLATION_FOREST:
        return train_isolation(config, dataset.X, dataset.feature_names)
    raise ValueError(f"unknown learner kind {config.kind!r}")


def predict_proba(model, rows):
    return model.predict_proba(rows)


def classify(model, rows, threshold: float = 0.5):
    """1 iff the model's probability strictly exceeds the threshold
    (isolation models threshold their anomaly score instead)."""
    if isinstance(model, IsolationModel):
        return model.classify(rows)
    return model.classify(rows, threshold)


def anomaly_score(model, rows):
    if not isinstance(model, IsolationModel):
        raise TypeError(f"anomaly_score requires an isolation forest, got {model.kind}")
    return model.anomaly_score(rows)


def feature_importance(model) -> list[tuple[str, float]]:
    if not isinstance(model, ForestModel):
        raise TypeError(f"feature_importance requires a random forest, got {model.kind}")
    return model.feature_importance()


def model_to_dict(model, encoder_ref: str | None = None) -> dict:
    d = model.to_dict()
    d["schema"] = "netal-model-v1"
    d["encoder_ref"] = encoder_ref
    return d


def model_from_dict(d: dict):
    kind = d.get("kind")
    if kind not in _MODEL_CLASSES:
        raise ValueError(f"unknown model kind {kind!r}")
    return _MODEL_CLASSES[kind].from_dict(d)


def save_model(model, path, encoder_ref: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model, encoder_ref), fh)
        fh.write("\n")


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
