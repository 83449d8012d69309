"""Learner configuration shared by all four model kinds."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

LOGISTIC = "logistic"
RANDOM_FOREST = "random_forest"
GRADIENT_BOOSTING = "gradient_boosting"
ISOLATION_FOREST = "isolation_forest"

KINDS = (LOGISTIC, RANDOM_FOREST, GRADIENT_BOOSTING, ISOLATION_FOREST)

SUPERVISED_KINDS = (LOGISTIC, RANDOM_FOREST, GRADIENT_BOOSTING)


@dataclass(frozen=True)
class LearnerConfig:
    kind: str
    n_estimators: int = 10
    l2_lambda: float = 1.0
    max_depth: int | None = None  # random forest only; None = unlimited
    seed: int = 0
    step_size: float = 0.1  # logistic gradient descent
    n_iterations: int = 500
    shrinkage: float = 0.1  # boosting
    boosting_depth: int = 3
    subsample_size: int = 256  # isolation forest sample per tree
    anomaly_threshold: float = 0.5  # isolation score -> binary decision

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown learner kind {self.kind!r}; expected one of {KINDS}")
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be >= 0")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1 when set")
        if self.step_size <= 0 or self.n_iterations < 1:
            raise ValueError("logistic optimizer settings must be positive")
        if self.shrinkage <= 0 or self.boosting_depth < 1:
            raise ValueError("boosting settings must be positive")
        if self.subsample_size < 2:
            raise ValueError("subsample_size must be >= 2")

    def with_seed(self, seed: int) -> "LearnerConfig":
        d = asdict(self)
        d["seed"] = int(seed)
        return LearnerConfig(**d)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "LearnerConfig":
        return cls(**d)
