import itertools

import numpy as np
import pytest

from netal.ensemble import (
    EnsembleModel,
    EnsembleSpec,
    default_ensemble_spec,
    ensemble_classify,
    train_ensemble,
)
from netal.learners import ISOLATION_FOREST, LOGISTIC, RANDOM_FOREST, LearnerConfig


class _VoteModel:
    """Fixed per-row votes, sidestepping any training."""

    def __init__(self, votes, d=2):
        self.votes = np.asarray(votes, dtype=np.int8)
        self.feature_names = [f"f{i}" for i in range(d)]
        self.n_features = d

    def classify(self, X, threshold=0.5):
        return self.votes[: np.atleast_2d(X).shape[0]]


def _rows(n, d=2):
    return np.zeros((n, d))


def test_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec(())
    cfg = LearnerConfig(LOGISTIC)
    with pytest.raises(ValueError):
        EnsembleSpec(((cfg, -1.0),))
    with pytest.raises(ValueError):
        EnsembleSpec(((cfg, 0.0), (cfg, 0.0)))
    spec = EnsembleSpec.equal_weights([LOGISTIC, RANDOM_FOREST], seed=3)
    assert all(w == 1.0 for _, w in spec.members)
    assert spec.with_seed(8).members[0][0].seed == 8
    assert EnsembleSpec.from_dict(spec.to_dict()) == spec


def test_default_spec_members():
    spec = default_ensemble_spec(seed=5)
    kinds = [cfg.kind for cfg, _ in spec.members]
    assert kinds == ["random_forest", "gradient_boosting", "logistic",
                     "isolation_forest"]
    assert all(w == 1.0 for _, w in spec.members)
    assert all(cfg.seed == 5 for cfg, _ in spec.members)


def test_vote_matches_enumeration_over_all_patterns():
    # every 4-member vote pattern x 100 random nonnegative weight vectors:
    # the model must agree with a literal reading of the vote rule
    rng = np.random.default_rng(42)
    patterns = list(itertools.product([0, 1], repeat=4))
    X = _rows(len(patterns))
    for _ in range(100):
        w = rng.random(4) * rng.choice([0.5, 1.0, 3.0], size=4)
        if w.sum() == 0:
            continue
        members = []
        for e in range(4):
            votes = np.array([pat[e] for pat in patterns], dtype=np.int8)
            members.append((_VoteModel(votes), float(w[e])))
        model = EnsembleModel(members)
        got = ensemble_classify(model, X)
        for r, pat in enumerate(patterns):
            expect = 1 if np.dot(w, pat) > w.sum() / 2.0 else 0
            assert got[r] == expect, (pat, w)


def test_exact_tie_votes_zero():
    # 2 of 4 equal-weight members voting 1 is not a strict majority
    members = [(_VoteModel([1]), 1.0), (_VoteModel([1]), 1.0),
               (_VoteModel([0]), 1.0), (_VoteModel([0]), 1.0)]
    model = EnsembleModel(members)
    assert model.classify(_rows(1))[0] == 0
    # single row in 1-D form returns a scalar
    assert model.classify(np.zeros(2)) == 0


def test_zero_weight_member_is_ignored():
    members = [(_VoteModel([1]), 0.0), (_VoteModel([0]), 1.0)]
    assert EnsembleModel(members).classify(_rows(1))[0] == 0
    members = [(_VoteModel([0]), 0.0), (_VoteModel([1]), 1.0)]
    assert EnsembleModel(members).classify(_rows(1))[0] == 1


def test_member_feature_count_must_agree():
    with pytest.raises(ValueError):
        EnsembleModel([(_VoteModel([1], d=2), 1.0), (_VoteModel([1], d=3), 1.0)])


def test_trained_ensemble_on_blobs(blobs):
    spec = default_ensemble_spec(seed=0)
    model = train_ensemble(spec, blobs)
    assert len(model.members) == 4
    votes = model.member_votes(blobs.X)
    assert votes.shape == (4, len(blobs))
    pred = model.classify(blobs.X)
    manual = (model.weights @ votes > model.weights.sum() / 2.0).astype(np.int8)
    np.testing.assert_array_equal(pred, manual)
    # the supervised members carry the separable signal
    acc = float((pred == blobs.y).mean())
    assert acc >= 0.9
    p = model.predict_proba(blobs.X)
    assert np.all((p >= 0.0) & (p <= 1.0))


def test_trained_ensemble_roundtrip(blobs):
    model = train_ensemble(default_ensemble_spec(seed=1), blobs)
    clone = EnsembleModel.from_dict(model.to_dict())
    np.testing.assert_array_equal(
        model.classify(blobs.X), clone.classify(blobs.X)
    )
    np.testing.assert_allclose(
        model.predict_proba(blobs.X), clone.predict_proba(blobs.X)
    )
    assert [m.kind for m, _ in clone.members] == [
        "random_forest", "gradient_boosting", "logistic", "isolation_forest"
    ]


def test_isolation_member_votes_via_anomaly_threshold(blobs):
    # a lone isolation member makes the ensemble an anomaly detector
    spec = EnsembleSpec(((LearnerConfig(ISOLATION_FOREST, seed=0), 1.0),))
    model = train_ensemble(spec, blobs)
    direct = model.members[0][0].classify(blobs.X)
    np.testing.assert_array_equal(model.classify(blobs.X), direct)
