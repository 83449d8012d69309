"""Query-selection strategies over a pool of unlabeled rows.

All four strategies return one candidate index. Score ties are detected
by exact floating equality (a tolerance knob exists, default 0), the
tied candidates are collected in ascending index order, and one is drawn
with the caller's generator, so a fixed rng state fixes the selection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

STRATEGIES = ("random", "uncertainty", "entropy", "isolation")


@dataclass
class Pool:
    """Unlabeled portion of a training matrix.

    X is the full row matrix; candidates index the rows still unlabeled.
    anomaly_scores, when present, is an X-aligned cache filled once by an
    isolation forest trained on the pool (see select_isolation).
    """

    X: np.ndarray
    candidates: np.ndarray
    anomaly_scores: np.ndarray | None = field(default=None)

    def __post_init__(self):
        self.candidates = np.asarray(self.candidates, dtype=np.int64)
        if len(np.unique(self.candidates)) != self.candidates.shape[0]:
            raise ValueError("candidate indices must be unique")
        if self.candidates.size and (
            self.candidates.min() < 0 or self.candidates.max() >= self.X.shape[0]
        ):
            raise ValueError("candidate index out of bounds")

    def __len__(self) -> int:
        return int(self.candidates.shape[0])

    def without(self, index: int) -> "Pool":
        keep = self.candidates != index
        if keep.all():
            raise KeyError(f"index {index} is not a candidate")
        return Pool(self.X, self.candidates[keep], self.anomaly_scores)


def _require_nonempty(pool: Pool) -> None:
    if len(pool) == 0:
        raise ValueError("pool has no candidates")


def _argmax_with_ties(scores, pool: Pool, rng, tie_tolerance: float):
    """Index of the max-scoring candidate; exact ties resolved by rng.

    `scores` aligns with pool.candidates. Candidates are already in
    ascending index order, so the tie set is too.
    """
    best = scores.max()
    tied = pool.candidates[scores >= best - tie_tolerance]
    if tied.shape[0] == 1:
        return int(tied[0])
    return int(tied[rng.integers(0, tied.shape[0])])


def select_random(pool: Pool, rng) -> int:
    """Uniform draw over the candidates."""
    _require_nonempty(pool)
    return int(pool.candidates[rng.integers(0, len(pool))])


def uncertainty_scores(p: np.ndarray) -> np.ndarray:
    """u = 1 - max(p, 1-p); maximal at p = 0.5."""
    return 1.0 - np.maximum(p, 1.0 - p)


def entropy_scores(p: np.ndarray) -> np.ndarray:
    """Binary entropy in bits with the 0 log 0 = 0 convention."""
    p = np.asarray(p, dtype=np.float64)
    out = np.zeros_like(p)
    interior = (p > 0.0) & (p < 1.0)
    pi = p[interior]
    out[interior] = -(pi * np.log2(pi) + (1.0 - pi) * np.log2(1.0 - pi))
    return out


def select_uncertainty(model, pool: Pool, rng, tie_tolerance: float = 0.0) -> int:
    """Candidate whose predicted probability is closest to 0.5."""
    _require_nonempty(pool)
    p = np.asarray(model.predict_proba(pool.X))
    scores = uncertainty_scores(p[pool.candidates])
    return _argmax_with_ties(scores, pool, rng, tie_tolerance)


def select_entropy(model, pool: Pool, rng, tie_tolerance: float = 0.0) -> int:
    """Candidate with maximal class entropy.

    Rank-equivalent to uncertainty in the binary case, but kept separate:
    its score plateaus interact differently with the tie-break draw."""
    _require_nonempty(pool)
    p = np.asarray(model.predict_proba(pool.X))
    scores = entropy_scores(p[pool.candidates])
    return _argmax_with_ties(scores, pool, rng, tie_tolerance)


def select_isolation(pool: Pool, rng, tie_tolerance: float = 0.0) -> int:
    """Most anomalous remaining candidate under the cached scores.

    The cache is computed once, before any querying, by an isolation
    forest trained on the unlabeled pool; it is never refreshed as the
    loop proceeds. Selection is decoupled from the evolving model."""
    _require_nonempty(pool)
    if pool.anomaly_scores is None:
        raise ValueError("isolation sampling requires cached anomaly scores")
    scores = pool.anomaly_scores[pool.candidates]
    return _argmax_with_ties(scores, pool, rng, tie_tolerance)


def _scalar(p) -> float:
    return float(np.asarray(p).reshape(-1)[0])


def select(strategy: str, model, pool: Pool, rng, tie_tolerance: float = 0.0):
    """Dispatch by strategy name; returns (index, score_of_selected)."""
    if strategy == "random":
        idx = select_random(pool, rng)
        return idx, None
    if strategy == "uncertainty":
        idx = select_uncertainty(model, pool, rng, tie_tolerance)
        p = _scalar(model.predict_proba(pool.X[idx]))
        return idx, float(uncertainty_scores(np.array([p]))[0])
    if strategy == "entropy":
        idx = select_entropy(model, pool, rng, tie_tolerance)
        p = _scalar(model.predict_proba(pool.X[idx]))
        return idx, float(entropy_scores(np.array([p]))[0])
    if strategy == "isolation":
        idx = select_isolation(pool, rng, tie_tolerance)
        return idx, float(pool.anomaly_scores[idx])
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
