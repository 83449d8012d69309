"""Detection metrics: confusion counts, F1, aggregation, z-score diagnostic."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion(predictions, truths) -> Confusion:
    pred = np.asarray(predictions).astype(np.int64).ravel()
    true = np.asarray(truths).astype(np.int64).ravel()
    if pred.shape != true.shape:
        raise ValueError(
            f"length mismatch: {pred.shape[0]} predictions vs {true.shape[0]} truths"
        )
    tp = int(((pred == 1) & (true == 1)).sum())
    fp = int(((pred == 1) & (true == 0)).sum())
    fn = int(((pred == 0) & (true == 1)).sum())
    tn = int(((pred == 0) & (true == 0)).sum())
    return Confusion(tp, fp, fn, tn)


def precision(c: Confusion) -> float:
    denom = c.tp + c.fp
    return c.tp / denom if denom else 0.0


def recall(c: Confusion) -> float:
    denom = c.tp + c.fn
    return c.tp / denom if denom else 0.0


def f1(c: Confusion) -> float:
    """F1 = 2PR/(P+R); every 0/0 resolves to 0 (nothing detected)."""
    p, r = precision(c), recall(c)
    return 2 * p * r / (p + r) if p + r else 0.0


@dataclass(frozen=True)
class MetricsSnapshot:
    confusion: Confusion
    precision: float
    recall: float
    f1: float


def snapshot(predictions, truths) -> MetricsSnapshot:
    c = confusion(predictions, truths)
    return MetricsSnapshot(c, precision(c), recall(c), f1(c))


def aggregate(values) -> tuple[float, float]:
    """Mean and sample standard deviation of per-attack values.

    Sample (n-1) std matches published summary rows; a single value
    aggregates to (value, 0).
    """
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise ValueError("nothing to aggregate")
    if v.size == 1:
        return float(v[0]), 0.0
    return float(v.mean()), float(v.std(ddof=1))


@dataclass
class ZScoreReport:
    """Per-feature separation between true positives and mispredictions.

    z_f = |mean_R,f - mean_W,f| / std_R,f with R the true positives and
    W the union of false positives and false negatives. Both sub-means
    are kept so either reading of "false positives or false negatives"
    stays recoverable. std_R,f = 0 with differing means yields the inf
    sentinel; too-small populations mark the whole report undefined.
    """

    feature_names: list[str]
    z: np.ndarray
    mu_r: np.ndarray
    mu_w: np.ndarray
    mu_fp: np.ndarray | None
    mu_fn: np.ndarray | None
    n_true_positives: int
    n_mispredictions: int
    defined: bool = field(default=True)

    def ranked(self) -> list[tuple[str, float]]:
        """Features by descending z; inf sentinels listed first."""
        if not self.defined:
            return []
        order = np.argsort(-self.z, kind="stable")
        return [(self.feature_names[i], float(self.z[i])) for i in order]

    def finite_z(self) -> dict[str, float]:
        if not self.defined:
            return {}
        return {
            self.feature_names[i]: float(self.z[i])
            for i in range(len(self.feature_names))
            if np.isfinite(self.z[i])
        }

    def to_dict(self) -> dict:
        def arr(a):
            if a is None:
                return None
            out = []
            for x in a:
                if np.isnan(x):
                    out.append(None)
                elif np.isinf(x):
                    out.append("inf")
                else:
                    out.append(float(x))
            return out

        return {
            "defined": self.defined,
            "n_true_positives": self.n_true_positives,
            "n_mispredictions": self.n_mispredictions,
            "features": self.feature_names,
            "z": arr(self.z),
            "mu_true_positive": arr(self.mu_r),
            "mu_mispredicted": arr(self.mu_w),
            "mu_false_positive": arr(self.mu_fp),
            "mu_false_negative": arr(self.mu_fn),
        }


def feature_z_scores(model, dev) -> ZScoreReport:
    """Classify `dev` with `model` and score features by |mu_R - mu_W|/sigma_R."""
    if len(dev) == 0:
        raise ValueError("dev set is empty")
    pred = np.asarray(model.classify(dev.X)).astype(np.int64)
    y = np.asarray(dev.y).astype(np.int64)
    r_mask = (pred == 1) & (y == 1)
    fp_mask = (pred == 1) & (y == 0)
    fn_mask = (pred == 0) & (y == 1)
    w_mask = fp_mask | fn_mask
    n_r, n_w = int(r_mask.sum()), int(w_mask.sum())
    d = dev.X.shape[1]
    names = list(dev.feature_names)
    if n_r < 2 or n_w == 0:
        nan = np.full(d, np.nan)
        return ZScoreReport(names, nan, nan, nan, None, None, n_r, n_w, defined=False)
    mu_r = dev.X[r_mask].mean(axis=0)
    sigma_r = dev.X[r_mask].std(axis=0)
    mu_w = dev.X[w_mask].mean(axis=0)
    diff = np.abs(mu_r - mu_w)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = diff / sigma_r
    z[diff == 0] = 0.0  # identical means: no separation regardless of spread
    z[(diff > 0) & (sigma_r == 0)] = np.inf
    mu_fp = dev.X[fp_mask].mean(axis=0) if fp_mask.any() else None
    mu_fn = dev.X[fn_mask].mean(axis=0) if fn_mask.any() else None
    return ZScoreReport(names, z, mu_r, mu_w, mu_fp, mu_fn, n_r, n_w)


def zscore_table(report: ZScoreReport, top: int = 15) -> str:
    """Aligned-text rendering of the top-z features."""
    if not report.defined:
        return (
            "z-scores undefined: "
            f"{report.n_true_positives} true positives, "
            f"{report.n_mispredictions} mispredictions\n"
        )
    rows = report.ranked()[:top]
    width = max(len(n) for n, _ in rows) if rows else 7
    lines = [f"{'feature':<{width}}  {'z':>10}"]
    for name, value in rows:
        shown = "inf" if np.isinf(value) else f"{value:.3f}"
        lines.append(f"{name:<{width}}  {shown:>10}")
    return "\n".join(lines) + "\n"
