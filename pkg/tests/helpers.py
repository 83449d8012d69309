"""Shared builders for unit tests."""

import numpy as np

from netal.dataset import EncodedDataset
from netal.kdd import FEATURE_NAMES


def full_line(label="normal.", **overrides):
    """A 42-field CSV line, zeros everywhere except named fields."""
    fields = {name: "0" for name in FEATURE_NAMES}
    fields["protocol_type"] = "tcp"
    fields["service"] = "http"
    fields["flag"] = "SF"
    fields.update({k: str(v) for k, v in overrides.items()})
    return ",".join([fields[n] for n in FEATURE_NAMES] + [label])


def two_blob_dataset(n=400, d=6, gap=6.0, seed=0, prevalence=0.5):
    """Linearly separable Gaussian blobs; positives shifted by `gap`."""
    rng = np.random.default_rng(seed)
    n1 = int(round(n * prevalence))
    n0 = n - n1
    X = rng.normal(size=(n, d))
    X[n0:, :2] += gap
    y = np.zeros(n, dtype=np.int8)
    y[n0:] = 1
    perm = rng.permutation(n)
    names = [f"f{j}" for j in range(d)]
    return EncodedDataset(X[perm], y[perm], names)
