"""Per-attack binary datasets, one-hot encoding, and seeded splits."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .kdd import (
    CATEGORICAL_IDX,
    CATEGORICAL_NAMES,
    CONTINUOUS_NAMES,
    FEATURE_NAMES,
    KddRecords,
    NORMAL_LABEL,
)

TRAIN_FRACTION = 0.8
DEV_FRACTION = 0.1


@dataclass
class BinaryDataset:
    """All normal records plus the records of exactly one attack type."""

    records: KddRecords
    attack_label: str

    def __post_init__(self):
        labels = self.records.labels
        bad = ~((labels == NORMAL_LABEL) | (labels == self.attack_label))
        if bad.any():
            raise ValueError(
                f"records contain labels other than {NORMAL_LABEL!r} "
                f"and {self.attack_label!r}"
            )

    def __len__(self) -> int:
        return len(self.records)

    @property
    def counts(self) -> tuple[int, int]:
        attacks = int((self.records.labels == self.attack_label).sum())
        return attacks, len(self.records) - attacks

    @property
    def prevalence(self) -> float:
        attacks, normals = self.counts
        return attacks / (attacks + normals)

    @property
    def binary_labels(self) -> np.ndarray:
        return (self.records.labels == self.attack_label).astype(np.int8)


def build_attack_datasets(
    records: KddRecords, min_occurrences: int = 100
) -> list[BinaryDataset]:
    """One dataset per attack type seen at least `min_occurrences` times.

    Each dataset pairs that attack's records with every normal record.
    Attacks under the threshold are dropped entirely. Output is ordered by
    descending attack count (ties by label) so the biggest dataset is first.
    """
    if min_occurrences < 1:
        raise ValueError("min_occurrences must be >= 1")
    labels = records.labels
    normal_mask = labels == NORMAL_LABEL
    if not normal_mask.any():
        raise ValueError("no normal records: prevalence would be undefined")
    uniq, cnt = np.unique(labels[~normal_mask], return_counts=True)
    keep = [(int(c), str(u)) for u, c in zip(uniq, cnt) if c >= min_occurrences]
    keep.sort(key=lambda t: (-t[0], t[1]))
    out = []
    for _, attack in keep:
        mask = normal_mask | (labels == attack)
        out.append(BinaryDataset(records.take(np.flatnonzero(mask)), attack))
    return out


@dataclass
class EncodedDataset:
    """Numeric design matrix with binary labels (1 = attack)."""

    X: np.ndarray
    y: np.ndarray
    feature_names: list[str]

    def __len__(self) -> int:
        return self.X.shape[0]

    def take(self, indices: np.ndarray) -> "EncodedDataset":
        return EncodedDataset(self.X[indices], self.y[indices], self.feature_names)


class Encoder:
    """One-hot expansion of the three categorical features.

    The vocabulary is fixed at fit time on a whole dataset, so any record
    encoded later (including live-session traffic) gets the same columns;
    values outside the vocabulary encode as all-zero within their group.
    Column order preserves the original 41-feature order, with each
    categorical feature expanded in place to `name=value` columns sorted
    by value. Blank (missing) numeric fields encode as 0.
    """

    def __init__(self, vocabulary: dict[str, list[str]]):
        for name in CATEGORICAL_NAMES:
            if name not in vocabulary or not vocabulary[name]:
                raise ValueError(f"vocabulary missing values for {name!r}")
        self.vocabulary = {n: list(vocabulary[n]) for n in CATEGORICAL_NAMES}
        names = []
        for i, fname in enumerate(FEATURE_NAMES):
            if i in CATEGORICAL_IDX:
                names.extend(f"{fname}={v}" for v in self.vocabulary[fname])
            else:
                names.append(fname)
        self.feature_names = names

    @classmethod
    def fit(cls, records: KddRecords) -> "Encoder":
        vocab = {}
        for name in CATEGORICAL_NAMES:
            vocab[name] = sorted(np.unique(records.categorical_column(name)).tolist())
        return cls(vocab)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def transform(self, records: KddRecords) -> np.ndarray:
        n = len(records)
        X = np.zeros((n, self.n_features), dtype=np.float64)
        col = 0
        cont_j = {name: j for j, name in enumerate(CONTINUOUS_NAMES)}
        for i, fname in enumerate(FEATURE_NAMES):
            if i in CATEGORICAL_IDX:
                values = records.categorical_column(fname)
                for v in self.vocabulary[fname]:
                    X[:, col] = values == v
                    col += 1
            else:
                X[:, col] = np.nan_to_num(records.continuous[:, cont_j[fname]], nan=0.0)
                col += 1
        return X

    def to_dict(self) -> dict:
        return {"vocabulary": self.vocabulary}

    @classmethod
    def from_dict(cls, d: dict) -> "Encoder":
        return cls(d["vocabulary"])


def encode(dataset: BinaryDataset) -> tuple[EncodedDataset, Encoder]:
    """Encode a whole binary dataset; returns the fitted encoder with it."""
    if len(dataset) == 0:
        raise ValueError("cannot encode an empty dataset")
    enc = Encoder.fit(dataset.records)
    X = enc.transform(dataset.records)
    return EncodedDataset(X, dataset.binary_labels, enc.feature_names), enc


@dataclass
class Splits:
    train: EncodedDataset
    dev: EncodedDataset
    test: EncodedDataset
    seed: int


def split(encoded: EncodedDataset, seed: int) -> Splits:
    """Seeded shuffle, then 80/10/10: floor train and dev, remainder test."""
    n = len(encoded)
    if n < 10:
        raise ValueError(f"need at least 10 rows to split, got {n}")
    order = np.random.default_rng(seed).permutation(n)
    n_train = int(np.floor(TRAIN_FRACTION * n))
    n_dev = int(np.floor(DEV_FRACTION * n))
    return Splits(
        train=encoded.take(order[:n_train]),
        dev=encoded.take(order[n_train : n_train + n_dev]),
        test=encoded.take(order[n_train + n_dev :]),
        seed=seed,
    )


def write_encoded_csv(encoded: EncodedDataset, path) -> None:
    """Columnar CSV: feature_names header plus a final `label` column."""
    header = ",".join(encoded.feature_names + ["label"])
    data = np.column_stack([encoded.X, encoded.y.astype(np.float64)])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in data:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v: float) -> str:
    if v == int(v):
        return str(int(v))
    return repr(float(v))


def read_encoded_csv(path) -> EncodedDataset:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        if not header or header[-1] != "label":
            raise ValueError(f"{path}: expected a trailing `label` column")
        data = np.loadtxt(fh, delimiter=",", ndmin=2, dtype=np.float64)
    if data.size == 0:
        data = data.reshape(0, len(header))
    return EncodedDataset(
        data[:, :-1], data[:, -1].astype(np.int8), header[:-1]
    )


def write_sidecar(path, dataset: BinaryDataset, encoder: Encoder, seed: int) -> None:
    """JSON metadata describing a persisted dataset."""
    attacks, normals = dataset.counts
    meta = {
        "attack_label": dataset.attack_label,
        "counts": {
            "attacks": attacks,
            "normals": normals,
            "records": attacks + normals,
        },
        "prevalence": dataset.prevalence,
        "seed": seed,
        "encoder": encoder.to_dict(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_sidecar(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
