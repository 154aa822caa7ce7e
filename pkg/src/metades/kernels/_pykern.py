"""Numpy fallback for the compiled kernels.

Mirrors `_ckern` operation for operation. Elementwise arithmetic follows the
same expression trees as the C loops so integer outputs (neighbor indices,
error counts) are identical across backends; transcendental results may
differ in the last ulps.
"""

import numpy as np


def perceptron_epochs(x, ypm, orders, lr, w0, w1, b):
    """Run fixed-budget online perceptron updates; return the final state.

    x: (n, 2) float64; ypm: (n,) float64 in {-1, +1}; orders: (epochs, n)
    int64 visit order per epoch; (w0, w1, b) the initial state. The sign
    tie (activation exactly zero) counts as the positive class.
    """
    x0 = x[:, 0]
    x1 = x[:, 1]
    for epoch in range(orders.shape[0]):
        order = orders[epoch]
        for j in order:
            a = w0 * x0[j] + w1 * x1[j] + b
            pred = 1.0 if a >= 0.0 else -1.0
            yj = ypm[j]
            if pred != yj:
                w0 += lr * yj * x0[j]
                w1 += lr * yj * x1[j]
                b += lr * yj
    return w0, w1, b


def knn_indices(queries, points, k, skip):
    """K nearest reference points per query, ties broken by lower index.

    queries: (nq, 2), points: (n, 2), skip: (nq,) int64 index excluded from
    the candidates of that query (-1 for none). Returns (nq, k) int64.
    Callers guarantee k never exceeds the number of finite candidates; the
    dispatch wrapper enforces this before either backend runs.
    """
    dx = queries[:, 0][:, None] - points[None, :, 0]
    dy = queries[:, 1][:, None] - points[None, :, 1]
    d = dx * dx + dy * dy
    rows = np.nonzero(skip >= 0)[0]
    if rows.size:
        d[rows, skip[rows]] = np.inf
    order = np.argsort(d, axis=1, kind="stable")
    return order[:, :k].astype(np.int64)


def profile_knn_indices(profiles, ref_profiles, kp, skip):
    """Nearest reference output profiles by Euclidean (= Hamming) distance.

    profiles: (nq, m) uint8 in {0,1}; ref_profiles: (n, m) uint8. Squared
    distances are exact small integers, so float64 matmul is exact.
    """
    p = profiles.astype(np.float64)
    r = ref_profiles.astype(np.float64)
    d = p.sum(axis=1)[:, None] + r.sum(axis=1)[None, :] - 2.0 * (p @ r.T)
    rows = np.nonzero(skip >= 0)[0]
    if rows.size:
        d[rows, skip[rows]] = np.inf
    order = np.argsort(d, axis=1, kind="stable")
    return order[:, :kp].astype(np.int64)


def assemble_meta(roc_idx, prof_idx, correct, post_true, confidence, k, kp):
    """Assemble per-(query, classifier) meta vectors.

    Layout per vector: [f1 (k) | f2 (k) | f3 | f4 (kp) | f5], length
    2k + kp + 2. correct/post_true are (n_ref, m) lookups; confidence is the
    precomputed (nq, m) clipped boundary-distance feature.
    """
    nq, m = confidence.shape
    dim = 2 * k + kp + 2
    out = np.empty((nq, m, dim), dtype=np.float64)
    f1 = correct[roc_idx]  # (nq, k, m)
    out[:, :, 0:k] = f1.transpose(0, 2, 1)
    out[:, :, k:2 * k] = post_true[roc_idx].transpose(0, 2, 1)
    out[:, :, 2 * k] = f1.sum(axis=1, dtype=np.int64) / k
    out[:, :, 2 * k + 1:2 * k + 1 + kp] = correct[prof_idx].transpose(0, 2, 1)
    out[:, :, dim - 1] = confidence
    return out


def gnb_delta(v, means, half_inv_var, class_const):
    """Posterior of meta-class 1 under the two-class diagonal Gaussian model.

    v: (ns, d); means/half_inv_var: (2, d); class_const: (2,) log prior plus
    log normalization per class. Accumulates dimensions left to right.
    """
    ns, dim = v.shape
    s0 = np.full(ns, class_const[0])
    s1 = np.full(ns, class_const[1])
    for d in range(dim):
        diff0 = v[:, d] - means[0, d]
        s0 -= diff0 * diff0 * half_inv_var[0, d]
        diff1 = v[:, d] - means[1, d]
        s1 -= diff1 * diff1 * half_inv_var[1, d]
    hi = np.maximum(s0, s1)
    e0 = np.exp(s0 - hi)
    e1 = np.exp(s1 - hi)
    return e1 / (e0 + e1)
