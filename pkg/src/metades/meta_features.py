"""Meta-feature extraction: the bridge from classifier behaviour to the
meta-problem.

For a query x and pool member c_i, the meta vector v_{i} concatenates, in
fixed order, five descriptors of c_i's local behaviour:

  f1 (K bits)   correctness of c_i on each feature-space neighbor of x
  f2 (K reals)  c_i's posterior for each neighbor's true label
  f3 (1 real)   mean of f1 (local accuracy)
  f4 (Kp bits)  correctness of c_i on each decision-space (output-profile)
                neighbor of x
  f5 (1 real)   c_i's confidence: clipped normalized distance of x from
                c_i's boundary

giving length 2K + Kp + 2. Meta-training extracts these with the
meta-training split itself as the neighbor reference set (each query
excluded from its own neighborhood); generalization uses the dynamic
selection set. Both run through one code path parameterized by the
reference set.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import kernels
from .datagen import Dataset
from .pool import Pool, decision_matrix, posterior1_matrix

DEFAULT_K = 7
DEFAULT_KP = 5
DEFAULT_HC = 0.7


class MetaSample(NamedTuple):
    v: np.ndarray
    alpha: int
    classifier_id: int  # 1-based pool id
    sample_id: int      # index into the originating dataset


@dataclass(frozen=True)
class MetaTrainingSet:
    """Meta-samples in sample-major, classifier-minor order."""

    vectors: np.ndarray          # (N, 2K + Kp + 2)
    alphas: np.ndarray           # (N,) in {0, 1}
    classifier_ids: np.ndarray   # (N,) 1-based
    sample_ids: np.ndarray       # (N,) indices into the source split
    k: int
    kp: int

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def samples(self):
        for i in range(len(self)):
            yield MetaSample(self.vectors[i], int(self.alphas[i]),
                             int(self.classifier_ids[i]), int(self.sample_ids[i]))


def meta_dim(k: int, kp: int) -> int:
    return 2 * k + kp + 2


def consensus_degree(votes) -> float:
    """Fraction of the pool voting for the majority class."""
    v = np.asarray(votes)
    if v.size == 0:
        raise ValueError("consensus of an empty vote set is undefined")
    n1 = int(np.sum(v == 1))
    return max(n1, v.size - n1) / v.size


def consensus_degrees(dm: np.ndarray) -> np.ndarray:
    """Row-wise consensus of a decision matrix."""
    m = dm.shape[1]
    n1 = np.sum(dm == 1, axis=1)
    return np.maximum(n1, m - n1) / m


def select_meta_training(t_lambda: Dataset, pool: Pool, h_c: float) -> np.ndarray:
    """Indices of samples whose pool consensus falls strictly below h_c.

    Samples the pool already agrees on teach the meta-classifier nothing
    about disagreement, so only low-consensus ones are kept.
    """
    if not 0.5 < h_c <= 1.0:
        raise ValueError("consensus threshold must lie in (0.5, 1]")
    h = consensus_degrees(decision_matrix(pool, t_lambda))
    kept = np.nonzero(h < h_c)[0]
    if kept.size == 0:
        warnings.warn("consensus filter selected no samples; "
                      "meta-training cannot proceed at this threshold")
    return kept


def _validate_neighbor_count(k: int, available: int, what: str) -> None:
    if k < 1:
        raise ValueError(f"{what} size must be positive")
    if k > available:
        raise ValueError(f"{what} size {k} exceeds the {available} "
                         f"available reference samples")


def region_of_competence(query, ref: Dataset, k: int,
                         exclude: Optional[int] = None) -> np.ndarray:
    """Indices of the K feature-space nearest reference samples, ascending
    by Euclidean distance, ties toward the lower index."""
    available = len(ref) - (1 if exclude is not None else 0)
    _validate_neighbor_count(k, available, "region of competence")
    q = np.asarray(query, dtype=np.float64).reshape(1, 2)
    skip = np.array([-1 if exclude is None else exclude], dtype=np.int64)
    return kernels.knn_indices(q, ref.x, k, skip)[0]


def output_profile(x, pool: Pool) -> np.ndarray:
    """Crisp decision vector of every pool member on x, as class ids."""
    pts = np.asarray(x, dtype=np.float64).reshape(1, 2)
    return np.array([c.predict_batch(pts)[0] for c in pool.classifiers],
                    dtype=np.int64)


def _profiles01(profiles: np.ndarray) -> np.ndarray:
    # class ids {1,2} -> bits {1,0}; any monotone encoding ranks equally
    return (np.asarray(profiles) == 1).astype(np.uint8)


def profile_neighbors(profile, ref_profiles: np.ndarray, kp: int,
                      exclude: Optional[int] = None) -> np.ndarray:
    """Indices of the Kp nearest reference output profiles (Euclidean over
    the {0,1} encoding), ascending, ties toward the lower index."""
    available = ref_profiles.shape[0] - (1 if exclude is not None else 0)
    _validate_neighbor_count(kp, available, "output profile set")
    q = _profiles01(np.asarray(profile).reshape(1, -1))
    r = _profiles01(ref_profiles)
    skip = np.array([-1 if exclude is None else exclude], dtype=np.int64)
    return kernels.profile_knn_indices(q, r, kp, skip)[0]


def extract_f1(classifier, roc_idx: np.ndarray, ref: Dataset) -> np.ndarray:
    """Hard correctness of the classifier on each neighbor."""
    pred = classifier.predict_batch(ref.x[roc_idx])
    return (pred == ref.y[roc_idx]).astype(np.float64)


def extract_f2(classifier, roc_idx: np.ndarray, ref: Dataset) -> np.ndarray:
    """Classifier posterior assigned to each neighbor's true label."""
    p1 = classifier.posterior1_batch(ref.x[roc_idx])
    return np.where(ref.y[roc_idx] == 1, p1, 1.0 - p1)


def extract_f3(f1_bits) -> float:
    return float(np.mean(f1_bits))


def extract_f4(classifier, prof_idx: np.ndarray, ref: Dataset) -> np.ndarray:
    """Hard correctness on the samples behind the nearest output profiles."""
    pred = classifier.predict_batch(ref.x[prof_idx])
    return (pred == ref.y[prof_idx]).astype(np.float64)


def extract_f5(classifier, query, norm: float) -> float:
    """Confidence: perpendicular boundary distance scaled by the
    classifier's training-time maximum and clipped to [0, 1]."""
    if not norm > 0.0:
        raise ValueError("f5 normalization scale must be positive")
    return min(classifier.boundary_distance(query) / norm, 1.0)


def boundary_norms(pool: Pool, data: Dataset) -> np.ndarray:
    """Per-member maximum boundary distance over a dataset; frozen at
    meta-training time and reused for every later f5."""
    norms = np.array([c.distance_batch(data.x).max() for c in pool.classifiers])
    if np.any(norms <= 0.0):
        bad = int(np.nonzero(norms <= 0.0)[0][0]) + 1
        raise ValueError(f"classifier {bad} has zero boundary spread")
    return norms


def build_meta_vector(pool: Pool, member: int, query, ref: Dataset,
                      k: int, kp: int, norms: np.ndarray,
                      exclude: Optional[int] = None) -> np.ndarray:
    """Meta vector [f1|f2|f3|f4|f5] of one pool member for one query."""
    c = pool[member]
    roc = region_of_competence(query, ref, k, exclude)
    ref_profiles = decision_matrix(pool, ref)
    prof = profile_neighbors(output_profile(query, pool), ref_profiles, kp,
                             exclude)
    f1 = extract_f1(c, roc, ref)
    v = np.concatenate([
        f1,
        extract_f2(c, roc, ref),
        [extract_f3(f1)],
        extract_f4(c, prof, ref),
        [extract_f5(c, query, float(norms[member]))],
    ])
    assert v.shape == (meta_dim(k, kp),)
    return v


@dataclass(frozen=True)
class ReferenceCache:
    """Pool behaviour on a neighbor reference set, precomputed once."""

    ref: Dataset
    profiles: np.ndarray    # (n, M) class ids
    correct: np.ndarray     # (n, M) uint8
    post_true: np.ndarray   # (n, M) posterior of the true label


def build_reference_cache(pool: Pool, ref: Dataset) -> ReferenceCache:
    dm = decision_matrix(pool, ref)
    p1 = posterior1_matrix(pool, ref)
    correct = (dm == ref.y[:, None]).astype(np.uint8)
    post_true = np.where(ref.y[:, None] == 1, p1, 1.0 - p1)
    return ReferenceCache(ref, dm, correct, post_true)


def meta_matrix(pool: Pool, queries_x: np.ndarray, cache: ReferenceCache,
                k: int, kp: int, norms: np.ndarray,
                skip: Optional[np.ndarray] = None) -> np.ndarray:
    """(nq, M, 2K+Kp+2) meta vectors for a batch of queries.

    skip[i] >= 0 excludes that reference index from query i's neighborhoods
    (used at meta-training, where queries live inside the reference set).
    """
    queries_x = np.ascontiguousarray(queries_x, dtype=np.float64)
    nq = queries_x.shape[0]
    n_ref = len(cache.ref)
    excluded = 0 if skip is None else 1
    _validate_neighbor_count(k, n_ref - excluded, "region of competence")
    _validate_neighbor_count(kp, n_ref - excluded, "output profile set")
    roc = kernels.knn_indices(queries_x, cache.ref.x, k, skip)
    qprof = np.stack([c.predict_batch(queries_x) for c in pool.classifiers],
                     axis=1)
    prof = kernels.profile_knn_indices(_profiles01(qprof),
                                       _profiles01(cache.profiles), kp, skip)
    dists = np.stack([c.distance_batch(queries_x) for c in pool.classifiers],
                     axis=1)
    confidence = np.minimum(dists / norms[None, :], 1.0)
    return kernels.assemble_meta(roc, prof, cache.correct, cache.post_true,
                                 confidence, k, kp)


def build_meta_training_set(t_lambda: Dataset, pool: Pool, k: int = DEFAULT_K,
                            kp: int = DEFAULT_KP, h_c: float = DEFAULT_HC,
                            norms: Optional[np.ndarray] = None) -> MetaTrainingSet:
    """Consensus-filter the meta-training split and extract one labeled
    meta-sample per (kept sample, pool member).

    alpha is 1 when the member classifies the sample correctly. Neighbors
    come from the full split with each query excluded from its own
    neighborhood; f5 scales are the members' maxima over the split unless
    frozen scales are supplied.
    """
    kept = select_meta_training(t_lambda, pool, h_c)
    if kept.size == 0:
        raise ValueError("consensus filter selected no samples; lower h_c "
                         "or use a more diverse pool")
    if norms is None:
        norms = boundary_norms(pool, t_lambda)
    cache = build_reference_cache(pool, t_lambda)
    mm = meta_matrix(pool, t_lambda.x[kept], cache, k, kp, norms,
                     skip=kept.astype(np.int64))
    m = len(pool)
    dim = meta_dim(k, kp)
    vectors = mm.reshape(kept.size * m, dim)
    alphas = cache.correct[kept].astype(np.int64).reshape(-1)
    classifier_ids = np.tile(np.arange(1, m + 1), kept.size)
    sample_ids = np.repeat(kept, m)
    return MetaTrainingSet(vectors, alphas, classifier_ids, sample_ids, k, kp)


def write_meta_csv(meta: MetaTrainingSet, path) -> None:
    """One row per meta-sample with the documented column layout."""
    k, kp = meta.k, meta.kp
    cols = ([f"f1_{i+1}" for i in range(k)] + [f"f2_{i+1}" for i in range(k)]
            + ["f3"] + [f"f4_{i+1}" for i in range(kp)] + ["f5"]
            + ["alpha", "classifier_id", "sample_id"])
    with open(path, "w", encoding="ascii") as fh:
        fh.write(",".join(cols) + "\n")
        for s in meta.samples():
            vals = [repr(float(x)) for x in s.v]
            fh.write(",".join(vals + [str(s.alpha), str(s.classifier_id),
                                      str(s.sample_id)]) + "\n")
