"""End-to-end dynamic selection: training pipeline and the generalization
engine.

Training chains the three phases: bag a pool from the training split,
consensus-filter the meta-training split and fit the Gaussian NB selector
on the extracted meta vectors, then freeze the selection split together
with the pool's behavior on it. At query time each member's meta vector is
scored into a competence delta and the three combination modes differ only
in what they do with the deltas:

  hybrid    (classify_h)  selected members vote, weighted by delta
  selection (classify_s)  selected members vote, unweighted
  weighting (classify_w)  all members vote, weighted by delta

Members are selected when delta exceeds the threshold; when none clears
it, the single highest-delta member is used so every query gets a
decision. The local-accuracy baselines OLA and LCA ride on the same
neighborhoods.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import nb
from .baselines import STATIC_RULES, AdaBoostModel, adaboost_predict_batch, adaboost_train
from .datagen import Dataset
from .meta_features import (
    DEFAULT_HC,
    DEFAULT_K,
    DEFAULT_KP,
    ReferenceCache,
    boundary_norms,
    build_meta_training_set,
    build_reference_cache,
    meta_dim,
    meta_matrix,
)
from .nb import GaussianNBModel
from .pool import Pool, bagging_generate, oracle_accuracy, single_best

UPSILON = 0.5

SELECTION_METHODS = ("metades_h", "metades_s", "metades_w", "ola", "lca")
METHODS = SELECTION_METHODS + ("oracle", "single_best", "voting", "average",
                               "product", "maximum", "adaboost")


@dataclass(frozen=True)
class CompetenceVector:
    """Per-member competence deltas and the surviving selection mask."""

    delta: np.ndarray
    selected: np.ndarray

    def __post_init__(self):
        if self.delta.shape != self.selected.shape:
            raise ValueError("delta and selection mask must align")
        if not self.selected.any():
            raise ValueError("selection mask may not be empty")


@dataclass(frozen=True)
class TrainedSystem:
    """Immutable product of the training pipeline."""

    pool: Pool
    model: GaussianNBModel
    dsel: Dataset
    dsel_cache: ReferenceCache
    norms: np.ndarray
    k: int
    kp: int
    h_c: float
    upsilon: float
    adaboost: Optional[AdaBoostModel] = None

    def __post_init__(self):
        if not 1 <= self.k <= len(self.dsel):
            raise ValueError("K must lie in [1, |DSEL|]")
        if not 1 <= self.kp <= len(self.dsel):
            raise ValueError("Kp must lie in [1, |DSEL|]")
        if not 0.0 < self.upsilon < 1.0:
            raise ValueError("selection threshold must lie in (0, 1)")
        if self.model.dim != meta_dim(self.k, self.kp):
            raise ValueError("meta-classifier dimension does not match K/Kp")
        if self.norms.shape != (len(self.pool),):
            raise ValueError("one f5 scale per pool member required")


def train_system(train: Dataset, t_lambda: Dataset, dsel: Dataset, m: int,
                 base_kind: str, seed: int, k: int = DEFAULT_K,
                 kp: int = DEFAULT_KP, h_c: float = DEFAULT_HC,
                 upsilon: float = UPSILON,
                 fit_adaboost: bool = False) -> TrainedSystem:
    """Run overproduction, meta-training, and selection-set freezing."""
    pool = bagging_generate(train, m, base_kind, seed)
    norms = boundary_norms(pool, t_lambda)
    meta = build_meta_training_set(t_lambda, pool, k, kp, h_c, norms)
    model = nb.fit(meta)
    cache = build_reference_cache(pool, dsel)
    booster = adaboost_train(train, m, base_kind, seed) if fit_adaboost else None
    return TrainedSystem(pool, model, dsel, cache, norms, k, kp, h_c,
                         upsilon, booster)


def _as_batch(x) -> np.ndarray:
    pts = np.asarray(x, dtype=np.float64)
    return pts.reshape(1, 2) if pts.ndim == 1 else pts


def competence_matrix(sys: TrainedSystem, xs) -> np.ndarray:
    """(n, M) competence deltas for a batch of queries."""
    xs = _as_batch(xs)
    mm = meta_matrix(sys.pool, xs, sys.dsel_cache, sys.k, sys.kp, sys.norms)
    flat = mm.reshape(-1, mm.shape[2])
    return nb.competence_batch(sys.model, flat).reshape(xs.shape[0], len(sys.pool))


def selection_mask(deltas: np.ndarray, upsilon: float) -> np.ndarray:
    """delta > upsilon, with the argmax member forced in when no one clears
    the bar (ties toward the lowest id)."""
    mask = deltas > upsilon
    empty = ~mask.any(axis=1)
    if empty.any():
        mask[empty, deltas[empty].argmax(axis=1)] = True
    return mask


def estimate_competences(sys: TrainedSystem, query) -> CompetenceVector:
    deltas = competence_matrix(sys, query)
    return CompetenceVector(deltas[0], selection_mask(deltas, sys.upsilon)[0])


def _pool_predictions(pool: Pool, xs: np.ndarray) -> np.ndarray:
    return np.stack([c.predict_batch(xs) for c in pool.classifiers], axis=1)


def weighted_vote(preds: np.ndarray, weights: np.ndarray) -> np.ndarray:
    s1 = (weights * (preds == 1)).sum(axis=1)
    s2 = (weights * (preds == 2)).sum(axis=1)
    return np.where(s1 >= s2, 1, 2).astype(np.int64)


def classify_h_batch(sys: TrainedSystem, xs) -> np.ndarray:
    xs = _as_batch(xs)
    deltas = competence_matrix(sys, xs)
    mask = selection_mask(deltas, sys.upsilon)
    return weighted_vote(_pool_predictions(sys.pool, xs), deltas * mask)


def classify_s_batch(sys: TrainedSystem, xs) -> np.ndarray:
    xs = _as_batch(xs)
    deltas = competence_matrix(sys, xs)
    mask = selection_mask(deltas, sys.upsilon)
    return weighted_vote(_pool_predictions(sys.pool, xs), mask.astype(float))


def classify_w_batch(sys: TrainedSystem, xs) -> np.ndarray:
    xs = _as_batch(xs)
    deltas = competence_matrix(sys, xs)
    return weighted_vote(_pool_predictions(sys.pool, xs), deltas)


def classify_h(sys: TrainedSystem, query) -> int:
    return int(classify_h_batch(sys, query)[0])


def classify_s(sys: TrainedSystem, query) -> int:
    return int(classify_s_batch(sys, query)[0])


def classify_w(sys: TrainedSystem, query) -> int:
    return int(classify_w_batch(sys, query)[0])


def _local_stats(sys: TrainedSystem, xs: np.ndarray):
    """Neighbor indices plus each member's correctness there."""
    from . import kernels

    roc = kernels.knn_indices(xs, sys.dsel.x, sys.k, None)
    return roc, sys.dsel_cache.correct[roc].astype(np.float64)  # (n, k, M)


def ola_classify_batch(sys: TrainedSystem, xs) -> np.ndarray:
    """Pick the member with the best plain accuracy over the query's
    neighborhood; ties toward the lowest id."""
    xs = _as_batch(xs)
    roc, corr = _local_stats(sys, xs)
    pick = corr.mean(axis=1).argmax(axis=1)
    preds = _pool_predictions(sys.pool, xs)
    return preds[np.arange(len(xs)), pick]


def lca_classify_batch(sys: TrainedSystem, xs) -> np.ndarray:
    """Pick the member most accurate on the neighbors sharing its own
    predicted class; no such neighbor means competence 0."""
    xs = _as_batch(xs)
    roc, corr = _local_stats(sys, xs)
    preds = _pool_predictions(sys.pool, xs)
    nb_labels = sys.dsel.y[roc]  # (n, k)
    comp = np.zeros_like(preds, dtype=np.float64)
    for cls in (1, 2):
        in_class = (nb_labels == cls)[:, :, None]  # (n, k, 1)
        denom = in_class.sum(axis=1).astype(np.float64)  # (n, 1)
        num = (corr * in_class).sum(axis=1)  # (n, M)
        with np.errstate(invalid="ignore"):
            frac = np.where(denom > 0, num / denom, 0.0)
        comp = np.where(preds == cls, frac, comp)
    pick = comp.argmax(axis=1)
    return preds[np.arange(len(xs)), pick]


def ola_classify(sys: TrainedSystem, query) -> int:
    return int(ola_classify_batch(sys, query)[0])


def lca_classify(sys: TrainedSystem, query) -> int:
    return int(lca_classify_batch(sys, query)[0])


def classify_batch(sys: TrainedSystem, method: str, xs) -> np.ndarray:
    """Label a batch of raw points with any label-producing method."""
    if method == "metades_h":
        return classify_h_batch(sys, xs)
    if method == "metades_s":
        return classify_s_batch(sys, xs)
    if method == "metades_w":
        return classify_w_batch(sys, xs)
    if method == "ola":
        return ola_classify_batch(sys, xs)
    if method == "lca":
        return lca_classify_batch(sys, xs)
    if method in STATIC_RULES:
        return STATIC_RULES[method](sys.pool, _as_batch(xs))
    if method == "single_best":
        best, _ = single_best(sys.pool, sys.dsel)
        return sys.pool[best - 1].predict_batch(_as_batch(xs))
    if method == "adaboost":
        if sys.adaboost is None:
            raise ValueError("system was trained without an AdaBoost model")
        return adaboost_predict_batch(sys.adaboost, xs)
    if method == "oracle":
        raise ValueError("the oracle needs true labels; use evaluate")
    raise ValueError(f"unknown method {method!r}")


def evaluate(sys: TrainedSystem, method: str, test: Dataset) -> float:
    """Mean 0-1 accuracy of one method over a labeled split."""
    if method == "oracle":
        return oracle_accuracy(sys.pool, test)
    labels = classify_batch(sys, method, test.x)
    return float((labels == test.y).mean())


def trace_query(sys: TrainedSystem, query) -> dict:
    """Per-query diagnostic record: neighborhoods, meta vectors, deltas,
    selection, and the three decisions."""
    from . import kernels
    from .meta_features import _profiles01

    xs = _as_batch(query)
    mm = meta_matrix(sys.pool, xs, sys.dsel_cache, sys.k, sys.kp, sys.norms)
    deltas = nb.competence_batch(sys.model, mm[0])
    mask = selection_mask(deltas.reshape(1, -1), sys.upsilon)[0]
    roc = kernels.knn_indices(xs, sys.dsel.x, sys.k, None)[0]
    qprof = _pool_predictions(sys.pool, xs)
    prof = kernels.profile_knn_indices(
        _profiles01(qprof), _profiles01(sys.dsel_cache.profiles), sys.kp, None)[0]
    return {
        "query": [float(v) for v in xs[0]],
        "neighbors": [int(j) for j in roc],
        "profile_neighbors": [int(j) for j in prof],
        "predictions": [int(p) for p in qprof[0]],
        "meta_vectors": [[float(v) for v in row] for row in mm[0]],
        "delta": [float(d) for d in deltas],
        "selected": [bool(s) for s in mask],
        "decision_h": classify_h(sys, query),
        "decision_s": classify_s(sys, query),
        "decision_w": classify_w(sys, query),
    }
