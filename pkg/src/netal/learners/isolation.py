"""Isolation forest with the canonical path-length anomaly score."""

from __future__ import annotations

import numpy as np

from ._kernels import build_isolation_tree, isolation_mean_path
from .config import ISOLATION_FOREST, LearnerConfig


def harmonic(m: int) -> float:
    """Exact harmonic number H(m) = sum_{k=1..m} 1/k."""
    if m < 1:
        return 0.0
    return float(np.sum(1.0 / np.arange(1, m + 1)))


def c_factor(m: int) -> float:
    """Average unsuccessful-search path length in a BST of m points.

    c(m) = 2H(m-1) - 2(m-1)/m for m >= 2; c(1) = c(0) = 0. In
    particular c(2) = 2*H(1) - 2*(1/2) = 1 exactly.
    """
    if m < 2:
        return 0.0
    return 2.0 * harmonic(m - 1) - 2.0 * (m - 1) / m


def c_table(up_to: int) -> np.ndarray:
    """c(m) for m = 0..up_to via one cumulative harmonic sweep."""
    table = np.zeros(up_to + 1)
    if up_to >= 2:
        m = np.arange(2, up_to + 1, dtype=np.float64)
        h = np.cumsum(1.0 / np.arange(1, up_to, dtype=np.float64))  # H(1)..H(up_to-1)
        table[2:] = 2.0 * h - 2.0 * (m - 1.0) / m
    return table


class IsolationModel:
    """Unsupervised scorer: s(x) = 2^(-E[h(x)] / c(psi)).

    h(x) is the leaf depth plus c(leaf_size) at truncated leaves,
    averaged over trees; higher scores mean easier to isolate. There is
    no probability semantics here, so predict_proba refuses; binary
    decisions threshold the anomaly score instead."""

    kind = ISOLATION_FOREST

    def __init__(self, config, feature_names, feature, threshold, left, right,
                 value, offsets, psi):
        self.config = config
        self.feature_names = list(feature_names)
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.value = value
        self.offsets = offsets
        self.psi = int(psi)
        self._c_table = c_table(self.psi)
        self._c_psi = c_factor(self.psi)

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

    def mean_path_length(self, X):
        X, single = self._check(X)
        e = isolation_mean_path(
            X, self.feature, self.threshold, self.left, self.right,
            self.value, self.offsets, self._c_table,
        )
        return float(e[0]) if single else e

    def anomaly_score(self, X):
        e = self.mean_path_length(X)
        return 2.0 ** (-e / self._c_psi)

    def predict_proba(self, X):
        raise TypeError(
            "isolation forest has no class probability; use anomaly_score"
        )

    def classify(self, X, threshold: float | None = None):
        """1 iff anomaly score exceeds the (configurable) threshold."""
        if threshold is None:
            threshold = self.config.anomaly_threshold
        s = self.anomaly_score(X)
        if np.isscalar(s):
            return int(s > threshold)
        return (s > threshold).astype(np.int8)

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
            "psi": self.psi,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IsolationModel":
        return cls(
            LearnerConfig.from_dict(d["config"]),
            d["feature_names"],
            np.array(d["feature"], dtype=np.int64),
            np.array(d["threshold"], dtype=np.float64),
            np.array(d["left"], dtype=np.int64),
            np.array(d["right"], dtype=np.int64),
            np.array(d["value"], dtype=np.float64),
            np.array(d["offsets"], dtype=np.int64),
            d["psi"],
        )


def train_isolation(config: LearnerConfig, X, feature_names) -> IsolationModel:
    from .forest import concat_trees

    X = np.ascontiguousarray(X, dtype=np.float64)
    n = X.shape[0]
    if n < 2:
        raise ValueError("isolation forest needs at least 2 rows")
    psi = min(config.subsample_size, n)
    max_depth = int(np.ceil(np.log2(psi)))
    rng = np.random.default_rng(config.seed)
    trees = []
    for _ in range(config.n_estimators):
        sample = rng.choice(n, size=psi, replace=False)
        tree_seed = int(rng.integers(0, 2**63, dtype=np.int64))
        trees.append(build_isolation_tree(X, sample, max_depth, np.uint64(tree_seed)))
    feature, threshold, left, right, value, offsets = concat_trees(trees)
    return IsolationModel(
        config, feature_names, feature, threshold, left, right, value, offsets, psi
    )
