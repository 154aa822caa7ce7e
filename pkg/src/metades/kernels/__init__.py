"""Kernel dispatch: compiled extension when available, numpy fallback otherwise.

Set METADES_PURE_PYTHON=1 to force the fallback. `BACKEND` reports which
implementation is active ("c" or "python"). Both backends take contiguous
arrays with the dtypes documented in `_pykern` and return identical neighbor
indices and error counts; floating-point outputs agree to ~1e-12.
"""

import os

import numpy as np

from . import _pykern

if os.environ.get("METADES_PURE_PYTHON"):
    _impl = _pykern
    BACKEND = "python"
else:
    try:
        from . import _ckern as _impl  # type: ignore[attr-defined]

        BACKEND = "c"
    except ImportError:
        _impl = _pykern
        BACKEND = "python"


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def _i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def _u8(a):
    return np.ascontiguousarray(a, dtype=np.uint8)


def _no_skip(nq):
    return np.full(nq, -1, dtype=np.int64)


def perceptron_epochs(x, ypm, orders, lr=1.0, init=(0.0, 0.0, 0.0)):
    w0, w1, b = (float(v) for v in init)
    return _impl.perceptron_epochs(_f64(x), _f64(ypm), _i64(orders), float(lr),
                                   w0, w1, b)


def _check_k(k, n, skip, what):
    # a query with an excluded reference has only n - 1 candidates; the C
    # selection loop requires enough finite entries to fill every slot
    available = n - 1 if bool((skip >= 0).any()) else n
    if not 1 <= k <= available:
        raise ValueError(f"{what}={k} outside [1, {available}] "
                         f"available reference points")


def knn_indices(queries, points, k, skip=None):
    queries = _f64(queries)
    points = _f64(points)
    skip = _no_skip(queries.shape[0]) if skip is None else _i64(skip)
    _check_k(int(k), points.shape[0], skip, "k")
    return np.asarray(_impl.knn_indices(queries, points, int(k), skip))


def profile_knn_indices(profiles, ref_profiles, kp, skip=None):
    profiles = _u8(profiles)
    ref_profiles = _u8(ref_profiles)
    skip = _no_skip(profiles.shape[0]) if skip is None else _i64(skip)
    _check_k(int(kp), ref_profiles.shape[0], skip, "kp")
    return np.asarray(
        _impl.profile_knn_indices(profiles, ref_profiles, int(kp), skip)
    )


def assemble_meta(roc_idx, prof_idx, correct, post_true, confidence, k, kp):
    return np.asarray(
        _impl.assemble_meta(
            _i64(roc_idx), _i64(prof_idx), _u8(correct), _f64(post_true),
            _f64(confidence), int(k), int(kp),
        )
    )


def gnb_delta(v, means, half_inv_var, class_const):
    return np.asarray(
        _impl.gnb_delta(_f64(v), _f64(means), _f64(half_inv_var), _f64(class_const))
    )
