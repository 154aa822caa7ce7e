"""Static fusion rules and AdaBoost: the comparison set that motivates
dynamic selection.

All four static rules fuse the whole pool for every query, so on problems
where each member is only locally competent they average away exactly the
signal dynamic selection exploits. Ties always resolve to class 1, and
competence-style argmax ties to the lowest classifier id, matching the
conventions used everywhere else in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .base import BaseClassifier, train_perceptron, train_stump
from .datagen import Dataset
from .pool import Pool

EPS_CLIP = 1e-10


def _posteriors1(pool: Pool, xs: np.ndarray) -> np.ndarray:
    return np.stack([c.posterior1_batch(xs) for c in pool.classifiers], axis=1)


def _predictions(pool: Pool, xs: np.ndarray) -> np.ndarray:
    return np.stack([c.predict_batch(xs) for c in pool.classifiers], axis=1)


def _as_batch(x) -> np.ndarray:
    pts = np.asarray(x, dtype=np.float64)
    return pts.reshape(1, 2) if pts.ndim == 1 else pts


def majority_vote_batch(pool: Pool, xs) -> np.ndarray:
    preds = _predictions(pool, _as_batch(xs))
    n1 = (preds == 1).sum(axis=1)
    return np.where(n1 >= preds.shape[1] - n1, 1, 2).astype(np.int64)


def average_rule_batch(pool: Pool, xs) -> np.ndarray:
    p1 = _posteriors1(pool, _as_batch(xs)).mean(axis=1)
    return np.where(p1 >= 0.5, 1, 2).astype(np.int64)


def product_rule_batch(pool: Pool, xs) -> np.ndarray:
    p1 = _posteriors1(pool, _as_batch(xs))
    with np.errstate(divide="ignore"):  # a zero posterior kills its class
        s1 = np.log(p1).sum(axis=1)
        s2 = np.log(1.0 - p1).sum(axis=1)
    return np.where(s1 >= s2, 1, 2).astype(np.int64)


def maximum_rule_batch(pool: Pool, xs) -> np.ndarray:
    p1 = _posteriors1(pool, _as_batch(xs))
    return np.where(p1.max(axis=1) >= (1.0 - p1).max(axis=1), 1, 2).astype(np.int64)


def majority_vote(pool: Pool, x) -> int:
    return int(majority_vote_batch(pool, x)[0])


def average_rule(pool: Pool, x) -> int:
    return int(average_rule_batch(pool, x)[0])


def product_rule(pool: Pool, x) -> int:
    return int(product_rule_batch(pool, x)[0])


def maximum_rule(pool: Pool, x) -> int:
    return int(maximum_rule_batch(pool, x)[0])


STATIC_RULES = {
    "voting": majority_vote_batch,
    "average": average_rule_batch,
    "product": product_rule_batch,
    "maximum": maximum_rule_batch,
}


@dataclass(frozen=True)
class AdaBoostModel:
    """Boosted stages: (weak learner, stage weight) pairs."""

    stages: tuple
    alphas: tuple

    def __post_init__(self):
        if len(self.stages) != len(self.alphas):
            raise ValueError("one stage weight per weak learner required")
        if any(not np.isfinite(a) for a in self.alphas):
            raise ValueError("stage weights must be finite")

    def __len__(self) -> int:
        return len(self.stages)


def adaboost_train(train: Dataset, t: int, base_kind: str,
                   seed: int = 0) -> AdaBoostModel:
    """Binary AdaBoost.M1 with reweighting.

    Stumps consume the weight vector exactly; perceptrons see it through a
    seeded weighted bootstrap resample. A round with weighted error >= 0.5
    is discarded and boosting stops; a perfect round is recorded (with the
    clipped-epsilon stage weight) and boosting stops.
    """
    if t < 1:
        raise ValueError("at least one boosting round required")
    if base_kind not in ("perceptron", "stump"):
        raise ValueError(f"unknown base kind {base_kind!r}")
    n = len(train)
    w = np.full(n, 1.0 / n)
    ypm = np.where(train.y == 1, 1.0, -1.0)
    children = np.random.SeedSequence(seed).spawn(t)
    stages, alphas = [], []
    for child in children:
        if base_kind == "stump":
            weak: BaseClassifier = train_stump(train, weights=w)
        else:
            weak = train_perceptron(train, weights=w, seed=child)
        hpm = np.where(weak.predict_batch(train.x) == 1, 1.0, -1.0)
        eps = float(w[hpm != ypm].sum())
        if eps >= 0.5:
            break
        clipped = min(max(eps, EPS_CLIP), 1.0 - EPS_CLIP)
        alpha = 0.5 * np.log((1.0 - clipped) / clipped)
        stages.append(weak)
        alphas.append(float(alpha))
        if eps == 0.0:
            break
        w = w * np.exp(-alpha * ypm * hpm)
        w /= w.sum()
    return AdaBoostModel(tuple(stages), tuple(alphas))


def adaboost_predict_batch(model: AdaBoostModel, xs) -> np.ndarray:
    xs = _as_batch(xs)
    score = np.zeros(xs.shape[0])
    for weak, alpha in zip(model.stages, model.alphas):
        score += alpha * np.where(weak.predict_batch(xs) == 1, 1.0, -1.0)
    return np.where(score >= 0.0, 1, 2).astype(np.int64)


def adaboost_predict(model: AdaBoostModel, x) -> int:
    return int(adaboost_predict_batch(model, x)[0])
