"""L2-regularized logistic regression via full-batch gradient descent."""

from __future__ import annotations

import numpy as np

from .config import LOGISTIC, LearnerConfig


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class LogisticModel:
    """Linear scorer on standardized continuous features.

    One-hot columns (names containing '=') pass through unstandardized;
    every other column is centered and scaled by its training std (a
    constant column scales by 1 and so contributes nothing). The
    intercept is left out of the L2 penalty, which is scaled by 1/n so
    l2_lambda means the same thing across training-set sizes.
    """

    kind = LOGISTIC

    def __init__(self, config, feature_names, weights, intercept, mu, sd):
        self.config = config
        self.feature_names = list(feature_names)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.intercept = float(intercept)
        self.mu = np.asarray(mu, dtype=np.float64)
        self.sd = np.asarray(sd, dtype=np.float64)

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]

    def _check(self, X):
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        if single:
            X = X.reshape(1, -1)
        if X.shape[1] != self.n_features:
            raise ValueError(
                f"expected {self.n_features} features, got {X.shape[1]}"
            )
        return X, single

    def decision_scores(self, X):
        X, single = self._check(X)
        z = (X - self.mu) / self.sd @ self.weights + self.intercept
        return (z[0] if single else z)

    def predict_proba(self, X):
        X, single = self._check(X)
        p = _sigmoid((X - self.mu) / self.sd @ self.weights + self.intercept)
        return float(p[0]) if single else p

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
            "weights": self.weights.tolist(),
            "intercept": self.intercept,
            "mu": self.mu.tolist(),
            "sd": self.sd.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogisticModel":
        return cls(
            LearnerConfig.from_dict(d["config"]),
            d["feature_names"],
            np.array(d["weights"]),
            d["intercept"],
            np.array(d["mu"]),
            np.array(d["sd"]),
        )


def standardization_params(X, feature_names):
    mu = np.zeros(X.shape[1])
    sd = np.ones(X.shape[1])
    for j, name in enumerate(feature_names):
        if "=" in name:
            continue
        mu[j] = X[:, j].mean()
        s = X[:, j].std()
        sd[j] = s if s > 0 else 1.0
    return mu, sd


def regularized_loss(Xs, y, weights, intercept, l2_lambda):
    """Mean logistic loss plus (lambda/2n)||w||^2; intercept unpenalized."""
    n = Xs.shape[0]
    z = Xs @ weights + intercept
    # log(1 + exp(-yz)) in a stable form
    yz = np.where(y == 1, z, -z)
    loss = np.logaddexp(0.0, -yz).mean()
    return loss + l2_lambda / (2.0 * n) * float(weights @ weights)


def train_logistic(config: LearnerConfig, X, y, feature_names) -> LogisticModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    n, d = X.shape
    mu, sd = standardization_params(X, feature_names)
    Xs = (X - mu) / sd
    w = np.zeros(d)
    b = 0.0
    lam = config.l2_lambda / n
    step = config.step_size
    for _ in range(config.n_iterations):
        p = _sigmoid(Xs @ w + b)
        err = p - y
        grad_w = Xs.T @ err / n + lam * w
        grad_b = err.mean()
        w -= step * grad_w
        b -= step * grad_b
    return LogisticModel(config, feature_names, w, b, mu, sd)
