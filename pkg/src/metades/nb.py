"""Gaussian Naive Bayes over meta-feature vectors.

This is the selector at the heart of the system: trained on meta vectors
labeled competent (alpha=1) or not (alpha=0), it turns a fresh meta vector
into a competence level delta = P(alpha=1 | v). Likelihoods accumulate in
log space (21+ dimensions underflow in linear space) and every per-class,
per-dimension variance gets an additive floor so the binary meta-features,
which are often constant within a class, stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .meta_features import MetaTrainingSet

VARIANCE_FLOOR = 1e-6

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class GaussianNBModel:
    """Per meta-class prior plus per-dimension mean and floored variance."""

    priors: np.ndarray     # (2,) for meta-classes (0, 1)
    means: np.ndarray      # (2, dim)
    variances: np.ndarray  # (2, dim), every entry >= VARIANCE_FLOOR

    def __post_init__(self):
        priors = np.asarray(self.priors, dtype=np.float64)
        means = np.asarray(self.means, dtype=np.float64)
        variances = np.asarray(self.variances, dtype=np.float64)
        if priors.shape != (2,) or not np.isclose(priors.sum(), 1.0):
            raise ValueError("priors must be two probabilities summing to 1")
        if means.ndim != 2 or means.shape[0] != 2 or variances.shape != means.shape:
            raise ValueError("means and variances must both be (2, dim)")
        if np.any(variances < VARIANCE_FLOOR):
            raise ValueError("variances fall below the variance floor")
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "variances", variances)

    @property
    def dim(self) -> int:
        return self.means.shape[1]


def fit(meta: MetaTrainingSet) -> GaussianNBModel:
    """Maximum-likelihood Gaussian NB fit of the competence meta-problem."""
    vectors = np.asarray(meta.vectors, dtype=np.float64)
    alphas = np.asarray(meta.alphas)
    for missing in (0, 1):
        if not np.any(alphas == missing):
            raise ValueError(f"meta-training set has no examples of "
                             f"meta-class {missing}; cannot fit both classes")
    priors = np.array([(alphas == 0).mean(), (alphas == 1).mean()])
    means = np.stack([vectors[alphas == c].mean(axis=0) for c in (0, 1)])
    variances = np.stack([vectors[alphas == c].var(axis=0) for c in (0, 1)])
    return GaussianNBModel(priors, means, variances + VARIANCE_FLOOR)


def _scoring_terms(model: GaussianNBModel):
    half_inv_var = 0.5 / model.variances
    class_const = (np.log(model.priors)
                   - 0.5 * np.log(model.variances).sum(axis=1)
                   - 0.5 * model.dim * _LOG_2PI)
    return half_inv_var, class_const


def competence_batch(model: GaussianNBModel, vs) -> np.ndarray:
    """delta = P(alpha=1 | v) for each row of vs."""
    vs = np.ascontiguousarray(vs, dtype=np.float64)
    if vs.ndim != 2 or vs.shape[1] != model.dim:
        raise ValueError(f"meta vectors have dimension "
                         f"{vs.shape[-1] if vs.ndim else 0}; "
                         f"model expects {model.dim}")
    half_inv_var, class_const = _scoring_terms(model)
    return kernels.gnb_delta(vs, model.means, half_inv_var, class_const)


def competence(model: GaussianNBModel, v) -> float:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError("competence expects a single meta vector")
    return float(competence_batch(model, v.reshape(1, -1))[0])
