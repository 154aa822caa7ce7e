"""Gaussian NB meta-classifier tests: closed-form fits, posterior behavior,
and numerical stability of the log-space path."""

import numpy as np
import pytest

from metades.meta_features import MetaTrainingSet
from metades.nb import VARIANCE_FLOOR, GaussianNBModel, competence, competence_batch, fit


def meta_set(vectors, alphas):
    vectors = np.asarray(vectors, dtype=np.float64)
    alphas = np.asarray(alphas, dtype=np.int64)
    n = len(alphas)
    return MetaTrainingSet(vectors, alphas, np.ones(n, dtype=np.int64),
                           np.arange(n, dtype=np.int64), k=1, kp=1)


def linear_space_delta(model, v):
    # independent oracle: direct Gaussian products, fine at moderate scales
    like = np.exp(-((v - model.means) ** 2) / (2 * model.variances))
    like /= np.sqrt(2 * np.pi * model.variances)
    joint = model.priors * like.prod(axis=1)
    return joint[1] / joint.sum()


def test_fit_priors_from_frequencies():
    vecs = np.zeros((100, 3))
    vecs[60:] += 1.0
    alphas = np.array([0] * 60 + [1] * 40)
    model = fit(meta_set(vecs, alphas))
    assert model.priors.tolist() == [0.6, 0.4]


def test_fit_hand_computed_parameters():
    # class 0: (0,0), (2,2); class 1: (4,6), (6,8)
    vecs = [[0.0, 0.0], [2.0, 2.0], [4.0, 6.0], [6.0, 8.0]]
    model = fit(meta_set(vecs, [0, 0, 1, 1]))
    assert np.allclose(model.means, [[1.0, 1.0], [5.0, 7.0]])
    assert np.allclose(model.variances, 1.0 + VARIANCE_FLOOR)
    assert np.allclose(model.priors, [0.5, 0.5])


def test_fit_constant_dimension_hits_floor():
    vecs = [[1.0, 0.3], [1.0, 0.7], [1.0, 0.1], [1.0, 0.9]]
    model = fit(meta_set(vecs, [0, 0, 1, 1]))
    assert model.variances[0, 0] == VARIANCE_FLOOR
    assert model.variances[1, 0] == VARIANCE_FLOOR
    delta = competence(model, [1.0, 0.5])
    assert np.isfinite(delta) and 0.0 <= delta <= 1.0


def test_fit_single_class_names_missing_class():
    vecs = np.random.default_rng(0).random((6, 2))
    with pytest.raises(ValueError, match="meta-class 0"):
        fit(meta_set(vecs, np.ones(6, dtype=int)))
    with pytest.raises(ValueError, match="meta-class 1"):
        fit(meta_set(vecs, np.zeros(6, dtype=int)))


def symmetric_model(sep=4.0, dim=3):
    means = np.stack([np.zeros(dim), np.full(dim, sep)])
    variances = np.ones((2, dim))
    return GaussianNBModel(np.array([0.5, 0.5]), means, variances)


def test_competence_equidistant_is_half():
    model = symmetric_model()
    mid = model.means.mean(axis=0)
    assert competence(model, mid) == 0.5


def test_competence_at_class1_mean_near_one():
    model = symmetric_model(sep=6.0)
    assert competence(model, model.means[1]) > 0.99


def test_competence_matches_linear_space_oracle():
    rng = np.random.default_rng(7)
    for _ in range(50):
        means = rng.normal(0, 1, size=(2, 4))
        variances = rng.uniform(0.1, 2.0, size=(2, 4))
        p1 = rng.uniform(0.1, 0.9)
        model = GaussianNBModel(np.array([1 - p1, p1]), means, variances)
        v = rng.normal(0, 1.5, size=4)
        assert competence(model, v) == pytest.approx(
            linear_space_delta(model, v), abs=1e-12)


def test_competence_normalization():
    rng = np.random.default_rng(8)
    model = symmetric_model()
    vs = rng.normal(0, 3, size=(200, 3))
    deltas = competence_batch(model, vs)
    assert np.all((deltas >= 0) & (deltas <= 1))
    # complementary posterior recomputed with classes swapped
    swapped = GaussianNBModel(model.priors[::-1].copy(),
                              model.means[::-1].copy(),
                              model.variances[::-1].copy())
    assert np.allclose(deltas + competence_batch(swapped, vs), 1.0, atol=1e-12)


def test_competence_permutation_invariance():
    rng = np.random.default_rng(9)
    means = rng.normal(0, 1, size=(2, 6))
    variances = rng.uniform(0.2, 1.5, size=(2, 6))
    model = GaussianNBModel(np.array([0.4, 0.6]), means, variances)
    v = rng.normal(0, 1, size=6)
    perm = rng.permutation(6)
    permuted = GaussianNBModel(model.priors, means[:, perm], variances[:, perm])
    assert competence(permuted, v[perm]) == pytest.approx(competence(model, v),
                                                          abs=1e-12)


def test_competence_extreme_inputs_stay_finite():
    # tiny variances and distant queries must not overflow or NaN
    means = np.stack([np.zeros(21), np.ones(21)])
    variances = np.full((2, 21), VARIANCE_FLOOR)
    model = GaussianNBModel(np.array([0.5, 0.5]), means, variances)
    with np.errstate(all="raise"):
        for v in (np.zeros(21), np.ones(21), np.full(21, 0.5)):
            delta = competence(model, v)
            assert np.isfinite(delta) and 0.0 <= delta <= 1.0
    assert competence(model, np.zeros(21)) < 1e-6
    assert competence(model, np.ones(21)) > 1 - 1e-6


def test_competence_dimension_mismatch():
    model = symmetric_model(dim=3)
    with pytest.raises(ValueError):
        competence(model, np.zeros(4))
    with pytest.raises(ValueError):
        competence_batch(model, np.zeros((5, 2)))


def test_batch_matches_scalar():
    rng = np.random.default_rng(10)
    model = symmetric_model(sep=2.0, dim=5)
    vs = rng.normal(1.0, 1.0, size=(20, 5))
    batch = competence_batch(model, vs)
    for i in range(20):
        assert batch[i] == pytest.approx(competence(model, vs[i]), abs=1e-15)


def test_model_validation():
    with pytest.raises(ValueError):
        GaussianNBModel(np.array([0.7, 0.7]), np.zeros((2, 2)), np.ones((2, 2)))
    with pytest.raises(ValueError):
        GaussianNBModel(np.array([0.5, 0.5]), np.zeros((2, 2)),
                        np.full((2, 2), VARIANCE_FLOOR / 2))
    with pytest.raises(ValueError):
        GaussianNBModel(np.array([0.5, 0.5]), np.zeros((3, 2)), np.ones((3, 2)))
