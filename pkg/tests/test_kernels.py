"""Compiled-vs-fallback kernel equivalence.

Integer outputs (neighbor indices, perceptron update trajectories) must be
identical; floating-point posteriors agree to near machine precision. The
whole module is skipped when the extension is not built.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

from metades import kernels
from metades.kernels import _pykern

_ckern = pytest.importorskip("metades.kernels._ckern",
                             reason="compiled extension not built")


def rng():
    return np.random.default_rng(1234)


def test_backend_constant_reports_compiled():
    if os.environ.get("METADES_PURE_PYTHON"):
        assert kernels.BACKEND == "python"
    else:
        assert kernels.BACKEND == "c"


def test_env_override_forces_fallback():
    env = dict(os.environ, METADES_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c",
         "from metades.kernels import BACKEND; print(BACKEND)"],
        capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"


def test_perceptron_epochs_identical():
    r = rng()
    n = 80
    x = r.random((n, 2))
    ypm = np.where(r.random(n) < 0.5, -1.0, 1.0)
    orders = np.stack([r.permutation(n) for _ in range(10)]).astype(np.int64)
    init = tuple(r.standard_normal(3))
    got_c = _ckern.perceptron_epochs(x, ypm, orders, 1.0, *init)
    got_py = _pykern.perceptron_epochs(x, ypm, orders, 1.0, *init)
    assert got_c == got_py


def test_knn_indices_identical_with_ties():
    r = rng()
    points = r.random((150, 2))
    points[40] = points[10]  # exact duplicates force tie-breaking
    points[77] = points[10]
    queries = np.vstack([r.random((120, 2)), points[10][None, :]])
    skip = np.full(len(queries), -1, dtype=np.int64)
    skip[::3] = r.integers(0, 150, size=len(skip[::3]))
    for k in (1, 7, 149):
        a = _ckern.knn_indices(queries, points, k, skip)
        b = _pykern.knn_indices(queries, points, k, skip)
        assert np.array_equal(np.asarray(a), np.asarray(b)), k


def test_profile_knn_indices_identical():
    r = rng()
    ref = (r.random((200, 7)) < 0.5).astype(np.uint8)
    queries = (r.random((90, 7)) < 0.5).astype(np.uint8)
    skip = np.full(90, -1, dtype=np.int64)
    skip[10:30] = np.arange(20)
    for kp in (1, 5, 199):
        a = _ckern.profile_knn_indices(queries, ref, kp, skip)
        b = _pykern.profile_knn_indices(queries, ref, kp, skip)
        assert np.array_equal(np.asarray(a), np.asarray(b)), kp


def test_dispatcher_rejects_k_beyond_candidates():
    r = rng()
    points = r.random((10, 2))
    queries = r.random((4, 2))
    kernels.knn_indices(queries, points, 10)  # fine without exclusions
    with pytest.raises(ValueError, match="available reference"):
        kernels.knn_indices(queries, points, 11)
    skip = np.array([0, -1, -1, 3], dtype=np.int64)
    kernels.knn_indices(queries, points, 9, skip=skip)
    with pytest.raises(ValueError, match="available reference"):
        kernels.knn_indices(queries, points, 10, skip=skip)
    profiles = (r.random((4, 3)) < 0.5).astype(np.uint8)
    ref = (r.random((6, 3)) < 0.5).astype(np.uint8)
    with pytest.raises(ValueError, match="kp=7"):
        kernels.profile_knn_indices(profiles, ref, 7)


def test_assemble_meta_identical():
    r = rng()
    nq, n_ref, m, k, kp = 60, 300, 5, 7, 5
    roc = r.integers(0, n_ref, size=(nq, k)).astype(np.int64)
    prof = r.integers(0, n_ref, size=(nq, kp)).astype(np.int64)
    correct = (r.random((n_ref, m)) < 0.5).astype(np.uint8)
    post = r.random((n_ref, m))
    conf = r.random((nq, m))
    a = _ckern.assemble_meta(roc, prof, correct, post, conf, k, kp)
    b = _pykern.assemble_meta(roc, prof, correct, post, conf, k, kp)
    assert np.array_equal(np.asarray(a), np.asarray(b))


def test_gnb_delta_near_identical():
    r = rng()
    v = r.standard_normal((500, 21)) * 3.0
    means = r.standard_normal((2, 21))
    half_inv_var = 0.5 / (r.random((2, 21)) + 1e-3)
    class_const = r.standard_normal(2)
    a = np.asarray(_ckern.gnb_delta(v, means, half_inv_var, class_const))
    b = np.asarray(_pykern.gnb_delta(v, means, half_inv_var, class_const))
    assert np.allclose(a, b, rtol=1e-12, atol=1e-14)


def test_dispatcher_round_trips_non_contiguous_input():
    # the wrappers must copy strided views before hitting the C signatures
    r = rng()
    wide = r.random((40, 4))
    queries = wide[:, ::2]
    points = r.random((60, 2))
    got = kernels.knn_indices(queries, points, 3)
    want = _pykern.knn_indices(np.ascontiguousarray(queries), points, 3,
                               np.full(40, -1, dtype=np.int64))
    assert np.array_equal(got, np.asarray(want))
