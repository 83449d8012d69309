"""Random forest: bootstrapped Gini trees, smoothed leaf-ratio voting."""

from __future__ import annotations

import numpy as np

from ._kernels import build_gini_tree, forest_mean_value
from .config import RANDOM_FOREST, LearnerConfig

_UNLIMITED = 2**31


class ForestModel:
    """Trees stored concatenated with per-tree offsets; child links are
    global indices so one traversal kernel serves the whole forest.
    predict_proba is the across-tree mean of Laplace-smoothed leaf
    positive ratios (n1+1)/(n+2)."""

    kind = RANDOM_FOREST

    def __init__(self, config, feature_names, feature, threshold, left, right,
                 value, offsets, importance_raw):
        self.config = config
        self.feature_names = list(feature_names)
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.value = value
        self.offsets = offsets
        self.importance_raw = importance_raw

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

    def predict_proba(self, X):
        X, single = self._check(X)
        p = forest_mean_value(
            X, self.feature, self.threshold, self.left, self.right,
            self.value, self.offsets,
        )
        return float(p[0]) if single else p

    def classify(self, X, threshold: float = 0.5):
        p = self.predict_proba(X)
        if np.isscalar(p):
            return int(p > threshold)
        return (p > threshold).astype(np.int8)

    def feature_importance(self) -> list[tuple[str, float]]:
        """Mean decrease in Gini impurity, normalized to sum to 1.

        A forest that never split (single-class training data) has no
        impurity decrease anywhere; importance is then uniform."""
        total = self.importance_raw.sum()
        if total <= 0:
            d = self.n_features
            return [(name, 1.0 / d) for name in self.feature_names]
        norm = self.importance_raw / total
        return [(name, float(norm[j])) for j, name in enumerate(self.feature_names)]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "config": self.config.to_dict(),
            "feature_names": self.feature_names,
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "offsets": self.offsets.tolist(),
            "importance_raw": self.importance_raw.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ForestModel":
        return cls(
            LearnerConfig.from_dict(d["config"]),
            d["feature_names"],
            np.array(d["feature"], dtype=np.int64),
            np.array(d["threshold"], dtype=np.float64),
            np.array(d["left"], dtype=np.int64),
            np.array(d["right"], dtype=np.int64),
            np.array(d["value"], dtype=np.float64),
            np.array(d["offsets"], dtype=np.int64),
            np.array(d["importance_raw"], dtype=np.float64),
        )


def concat_trees(trees):
    """Stack per-tree node arrays, rewriting child links to global ids."""
    offsets = np.zeros(len(trees) + 1, dtype=np.int64)
    for t, (feature, *_rest) in enumerate(trees):
        offsets[t + 1] = offsets[t] + feature.shape[0]
    feature = np.concatenate([t[0] for t in trees])
    threshold = np.concatenate([t[1] for t in trees])
    left = np.concatenate([t[2] for t in trees])
    right = np.concatenate([t[3] for t in trees])
    value = np.concatenate([t[4] for t in trees])
    for t in range(len(trees)):
        lo, hi = offsets[t], offsets[t + 1]
        seg = slice(lo, hi)
        internal = feature[seg] >= 0
        left[seg][...] = np.where(internal, left[seg] + lo, left[seg])
        right[seg][...] = np.where(internal, right[seg] + lo, right[seg])
    return feature, threshold, left, right, value, offsets


def train_forest(config: LearnerConfig, X, y, feature_names) -> ForestModel:
    X = np.ascontiguousarray(X, dtype=np.float64)
    y64 = np.asarray(y, dtype=np.int64).ravel()
    n, d = X.shape
    mtry = int(np.ceil(np.sqrt(d)))
    max_depth = config.max_depth if config.max_depth is not None else _UNLIMITED
    rng = np.random.default_rng(config.seed)
    importance = np.zeros(d, dtype=np.float64)
    trees = []
    for _ in range(config.n_estimators):
        sample = rng.integers(0, n, size=n)
        tree_seed = int(rng.integers(0, 2**63, dtype=np.int64))
        trees.append(
            build_gini_tree(X, y64, sample, mtry, max_depth, np.uint64(tree_seed), importance)
        )
    feature, threshold, left, right, value, offsets = concat_trees(trees)
    return ForestModel(
        config, feature_names, feature, threshold, left, right, value, offsets,
        importance,
    )
