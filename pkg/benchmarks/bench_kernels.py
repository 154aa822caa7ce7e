"""Timing comparison of the compiled kernels against the numpy fallback.

Runs each kernel on a workload shaped like the real benchmark loop
(competence estimation for a 2000-query test split against a 500-sample
selection set) and prints per-backend wall times plus the speedup.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from metades.kernels import _pykern

try:
    from metades.kernels import _ckern
except ImportError:
    _ckern = None


def make_workloads(r):
    n_ref, nq, m, k, kp = 500, 2000, 100, 7, 5
    queries = r.random((nq, 2))
    points = r.random((n_ref, 2))
    no_skip = np.full(nq, -1, dtype=np.int64)
    profiles = (r.random((nq, m)) < 0.5).astype(np.uint8)
    ref_profiles = (r.random((n_ref, m)) < 0.5).astype(np.uint8)
    roc = r.integers(0, n_ref, size=(nq, k)).astype(np.int64)
    prof = r.integers(0, n_ref, size=(nq, kp)).astype(np.int64)
    correct = (r.random((n_ref, m)) < 0.5).astype(np.uint8)
    post = r.random((n_ref, m))
    conf = r.random((nq, m))
    dim = 2 * k + kp + 2
    vs = r.standard_normal((nq * m, dim))
    means = r.standard_normal((2, dim))
    half_inv_var = 0.5 / (r.random((2, dim)) + 1e-3)
    class_const = r.standard_normal(2)
    x = r.random((500, 2))
    ypm = np.where(r.random(500) < 0.5, -1.0, 1.0)
    orders = np.stack([r.permutation(500) for _ in range(10)]).astype(np.int64)
    return {
        "knn_indices": ("knn 2000q x 500ref k=7",
                        lambda b: b.knn_indices(queries, points, k, no_skip)),
        "profile_knn_indices": (
            "profile knn 2000q x 500ref kp=5",
            lambda b: b.profile_knn_indices(profiles, ref_profiles, kp, no_skip)),
        "assemble_meta": (
            "meta assembly 2000q x 100 members",
            lambda b: b.assemble_meta(roc, prof, correct, post, conf, k, kp)),
        "gnb_delta": ("nb scoring 200k vectors dim=21",
                      lambda b: b.gnb_delta(vs, means, half_inv_var, class_const)),
        "perceptron_epochs": (
            "perceptron 500 samples x 10 epochs",
            lambda b: b.perceptron_epochs(x, ypm, orders, 1.0, 0.1, -0.2, 0.05)),
    }


def best_of(fn, backend, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(backend)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing repetitions per kernel (best is kept)")
    args = parser.parse_args()
    workloads = make_workloads(np.random.default_rng(0))
    print(f"{'kernel':<34} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for name, (label, fn) in workloads.items():
        py = best_of(fn, _pykern, args.repeat)
        if _ckern is None:
            print(f"{label:<34} {py * 1e3:>8.2f}ms {'n/a':>10} {'n/a':>8}")
            continue
        c = best_of(fn, _ckern, args.repeat)
        print(f"{label:<34} {py * 1e3:>8.2f}ms {c * 1e3:>8.2f}ms "
              f"{py / c:>7.1f}x")
    if _ckern is None:
        print("\ncompiled extension not built; showing fallback only")


if __name__ == "__main__":
    main()
