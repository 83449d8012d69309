"""Gradient boosting with shallow regression trees on logistic loss."""

from __future__ import annotations

import numpy as np

from ._kernels import build_regression_tree, forest_sum_value
from .config import GRADIENT_BOOSTING, LearnerConfig
from .forest import concat_trees
from .linear import _sigmoid

_PRIOR_CLIP = 1e-6
_MIN_GAIN = 1e-10


class BoostedModel:
    """Additive model: clipped prior log-odds plus shrinkage-scaled trees.

    Trees fit pseudo-residuals y - p with one-step Newton leaf values,
    so an empty tree list degenerates to the training positive rate."""

    kind = GRADIENT_BOOSTING

    def __init__(self, config, feature_names, base_score, feature=None,
                 threshold=None, left=None, right=None, value=None, offsets=None):
        self.config = config
        self.feature_names = list(feature_names)
        self.base_score = float(base_score)
        empty_i = np.zeros(0, dtype=np.int64)
        empty_f = np.zeros(0, dtype=np.float64)
        self.feature = feature if feature is not None else empty_i
        self.threshold = threshold if threshold is not None else empty_f
        self.left = left if left is not None else empty_i
        self.right = right if right is not None else empty_i
        self.value = value if value is not None else empty_f
        self.offsets = offsets if offsets is not None else np.zeros(1, dtype=np.int64)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    @property
    def n_trees(self) -> int:
        return self.offsets.shape[0] - 1

    def _check(self, X):
        X = np.ascontiguousarray(X, dtype=np.float64)
        single = X.ndim == 1
        if single:
            X = X.reshape(1, -1)
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        return X, single

    def decision_scores(self, X):
        X, single = self._check(X)
        z = np.full(X.shape[0], self.base_score)
        if self.n_trees:
            z += self.config.shrinkage * forest_sum_value(
                X, self.feature, self.threshold, self.left, self.right,
                self.value, self.offsets,
            )
        return float(z[0]) if single else z

    def predict_proba(self, X):
        z = self.decision_scores(X)
        if np.isscalar(z):
            return float(_sigmoid(np.array([z]))[0])
        return _sigmoid(z)

    def classify(self, X, threshold: float = 0.5):
        p = self.predict_proba(X)
        if np.isscalar(p):
            return int(p > threshold)
        return (p > threshold).astype(np.int8)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "config": self.config.to_dict(),
            "feature_names": self.feature_names,
            "base_score": self.base_score,
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "offsets": self.offsets.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BoostedModel":
        return cls(
            LearnerConfig.from_dict(d["config"]),
            d["feature_names"],
            d["base_score"],
            np.array(d["feature"], dtype=np.int64),
            np.array(d["threshold"], dtype=np.float64),
            np.array(d["left"], dtype=np.int64),
            np.array(d["right"], dtype=np.int64),
            np.array(d["value"], dtype=np.float64),
            np.array(d["offsets"], dtype=np.int64),
        )


def prior_log_odds(y) -> float:
    p0 = float(np.clip(np.mean(y), _PRIOR_CLIP, 1.0 - _PRIOR_CLIP))
    return float(np.log(p0 / (1.0 - p0)))


def train_boosting(config: LearnerConfig, X, y, feature_names) -> BoostedModel:
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    base = prior_log_odds(y)
    z = np.full(X.shape[0], base)
    trees = []
    for _ in range(config.n_estimators):
        p = _sigmoid(z)
        grad = y - p
        hess = p * (1.0 - p)
        tree = build_regression_tree(X, grad, hess, config.boosting_depth, _MIN_GAIN)
        trees.append(tree)
        feature, threshold, left, right, value, offsets = concat_trees([tree])
        z += config.shrinkage * forest_sum_value(
            X, feature, threshold, left, right, value, offsets
        )
    feature, threshold, left, right, value, offsets = concat_trees(trees)
    return BoostedModel(
        config, feature_names, base, feature, threshold, left, right, value, offsets
    )
