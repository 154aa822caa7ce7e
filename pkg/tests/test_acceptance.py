"""Acceptance gate: the ten shipping criteria, one printed verdict line
each (run with `pytest tests/test_acceptance.py -v -s` to see the lines).

Criteria 1-5 share one deterministic ten-seed benchmark fixture: train a
five-perceptron system per seed, evaluate every method once. Criteria 6-7
run the selection-set-size and pool-size sweeps, 8 is the hand-built
two-classifier selection oracle on the checkerboard problem, 9 checks
structural dimensions, and 10 bundles the exhaustive property suites.
"""

import math
import time

import numpy as np
import pytest

from metades import kernels, nb
from metades.base import Perceptron, train_stump
from metades.baselines import EPS_CLIP, adaboost_train, majority_vote_batch
from metades.boundary import decision_grid, write_boundary_csv
from metades.core import (
    METHODS,
    classify_batch,
    evaluate,
    train_system,
    weighted_vote,
)
from metades.datagen import Dataset, GenSpec, generate
from metades.meta_features import meta_dim, select_meta_training
from metades.nb import GaussianNBModel
from metades.persist import load_system, save_system
from metades.pool import Pool

SEEDS = tuple(range(10))

SIZES = (500, 500, 500, 2000)

BENCH_METHODS = ("metades_h", "oracle", "single_best", "voting", "average",
                 "product", "maximum", "adaboost")

STATIC_METHODS = ("voting", "average", "product", "maximum", "adaboost")


def report(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


@pytest.fixture(scope="session")
def bench():
    t0 = time.perf_counter()
    accs = {m: [] for m in BENCH_METHODS}
    fractions = []
    system0 = None
    for seed in SEEDS:
        t, tl, dsel, g = generate(GenSpec("p2", SIZES, seed))
        system = train_system(t, tl, dsel, m=5, base_kind="perceptron",
                              seed=seed, fit_adaboost=True)
        for method in BENCH_METHODS:
            accs[method].append(evaluate(system, method, g))
        kept = select_meta_training(tl, system.pool, h_c=0.7)
        fractions.append(len(kept) / len(tl))
        if seed == 0:
            system0 = system
    return {
        "medians": {m: float(np.median(v)) for m, v in accs.items()},
        "accs": accs,
        "fraction_median": float(np.median(fractions)),
        "elapsed": time.perf_counter() - t0,
        "system0": system0,
    }


def test_criterion_01_selection_accuracy_and_runtime(bench):
    med = bench["medians"]["metades_h"]
    ok = med >= 0.90 and bench["elapsed"] < 60.0
    report(1, ok, f"metades_h median {med:.4f} >= 0.90 over 10 seeds, "
                  f"{bench['elapsed']:.1f}s < 60s")


def test_criterion_02_oracle(bench):
    med = bench["medians"]["oracle"]
    report(2, med >= 0.99, f"oracle median {med:.4f} >= 0.99")


def test_criterion_03_single_best(bench):
    med = bench["medians"]["single_best"]
    report(3, 0.48 <= med <= 0.62,
           f"single best median {med:.4f} in [0.48, 0.62]")


def test_criterion_04_static_rules_trail_selection(bench):
    med = bench["medians"]
    worst = max(med[m] for m in STATIC_METHODS)
    gap = med["metades_h"] - worst
    ok = all(med[m] <= 0.65 for m in STATIC_METHODS) and gap >= 0.20
    detail = ", ".join(f"{m} {med[m]:.4f}" for m in STATIC_METHODS)
    report(4, ok, f"statics all <= 0.65 ({detail}); "
                  f"margin over best static {gap:.4f} >= 0.20")


def test_criterion_05_selection_fraction(bench):
    frac = bench["fraction_median"]
    report(5, abs(frac - 0.70) <= 0.10,
           f"median kept fraction {frac:.4f} within 0.70 +/- 0.10")


def test_criterion_06_selection_set_size_helps():
    medians = {}
    for kind in ("perceptron", "stump"):
        for size in (50, 1000):
            accs = []
            for seed in range(5):
                t, tl, dsel, g = generate(
                    GenSpec("p2", (500, 500, size, 2000), seed))
                system = train_system(t, tl, dsel, m=100, base_kind=kind,
                                      seed=seed)
                accs.append(evaluate(system, "metades_h", g))
            medians[kind, size] = float(np.median(accs))
    ok = all(medians[kind, 1000] >= medians[kind, 50]
             for kind in ("perceptron", "stump"))
    detail = "; ".join(
        f"{kind}: {medians[kind, 50]:.4f} (50) -> {medians[kind, 1000]:.4f} (1000)"
        for kind in ("perceptron", "stump"))
    report(6, ok, detail)


def test_criterion_07_pool_size_insensitive():
    ranges = []
    for seed in range(5):
        t, tl, dsel, g = generate(GenSpec("p2", SIZES, seed))
        accs = [evaluate(train_system(t, tl, dsel, m, "perceptron", seed),
                         "metades_h", g)
                for m in range(5, 101, 5)]
        ranges.append(max(accs) - min(accs))
    med = float(np.median(ranges))
    report(7, med <= 0.07,
           f"median accuracy range across pool sizes {med:.4f} <= 0.07")


def test_criterion_08_checkerboard_selection_oracle():
    # two half-plane voters that always disagree; picking by quadrant is
    # perfect while any consensus rule is a coin flip
    c1 = Perceptron(w=(0.0, 1.0), b=-0.5)
    c2 = Perceptron(w=(0.0, -1.0), b=0.5)
    pool = Pool((c1, c2))
    _, _, _, g = generate(GenSpec("xor", (10, 10, 10, 1000), seed=7))
    assert len(g) == 1000

    def select(point):
        right, top = point[0] > 0.5, point[1] > 0.5
        if right and top:          # Q1
            return c1
        if not right and top:      # Q2
            return c2
        if not right and not top:  # Q3
            return c2
        return c1                  # Q4

    selected = np.array([select(p).predict(p) for p in g.x])
    dynamic_acc = float(np.mean(selected == g.y))
    majority_acc = float(np.mean(majority_vote_batch(pool, g.x) == g.y))
    ok = dynamic_acc == 1.0 and abs(majority_acc - 0.5) <= 0.02
    report(8, ok, f"quadrant selection {dynamic_acc:.4f} == 1.0, "
                  f"majority vote {majority_acc:.4f} ~= 0.5")


def test_criterion_09_structural_dimensions(bench, tmp_path):
    system = bench["system0"]
    dim_ok = meta_dim(7, 5) == 21 and system.model.dim == 21
    points, labels = decision_grid(system, "metades_h", 100)
    path = tmp_path / "boundary.csv"
    write_boundary_csv(points, labels, path)
    rows = len(path.read_text().splitlines()) - 1  # header line
    grid_ok = (points.shape == (10000, 2) and rows == 10000
               and set(np.unique(labels)) <= {1, 2})
    report(9, dim_ok and grid_ok,
           f"meta-vector length {meta_dim(7, 5)} == 21; "
           f"resolution-100 grid emitted {rows} labeled points")


def _brute_knn(queries, points, k, skip):
    out = np.empty((len(queries), k), dtype=np.int64)
    for qi, q in enumerate(queries):
        d2 = ((points - q) ** 2).sum(axis=1)
        cand = sorted((float(d2[i]), i) for i in range(len(points))
                      if i != skip[qi])
        out[qi] = [i for _, i in cand[:k]]
    return out


def _brute_profile_knn(queries, ref, kp, skip):
    out = np.empty((len(queries), kp), dtype=np.int64)
    for qi, q in enumerate(queries):
        ham = (ref != q).sum(axis=1)
        cand = sorted((int(ham[i]), i) for i in range(len(ref))
                      if i != skip[qi])
        out[qi] = [i for _, i in cand[:kp]]
    return out


def _check_neighbor_oracles(r):
    for _ in range(200):
        n = int(r.integers(10, 61))
        nq = int(r.integers(1, 6))
        points = r.random((n, 2))
        if r.random() < 0.3:  # duplicates to exercise tie-breaking
            points[r.integers(0, n)] = points[r.integers(0, n)]
        queries = r.random((nq, 2))
        skip = np.where(r.random(nq) < 0.5,
                        r.integers(0, n, size=nq), -1).astype(np.int64)
        k = int(r.integers(1, min(9, n - 1)))
        got = kernels.knn_indices(queries, points, k, skip=skip)
        if not np.array_equal(got, _brute_knn(queries, points, k, skip)):
            return False
    for _ in range(200):
        n = int(r.integers(10, 61))
        nq = int(r.integers(1, 6))
        m = int(r.integers(3, 9))
        ref = (r.random((n, m)) < 0.5).astype(np.uint8)
        queries = (r.random((nq, m)) < 0.5).astype(np.uint8)
        skip = np.where(r.random(nq) < 0.5,
                        r.integers(0, n, size=nq), -1).astype(np.int64)
        kp = int(r.integers(1, min(7, n - 1)))
        got = kernels.profile_knn_indices(queries, ref, kp, skip=skip)
        if not np.array_equal(got, _brute_profile_knn(queries, ref, kp, skip)):
            return False
    return True


def _check_nb_normalization(r):
    for _ in range(20):
        dim = int(r.integers(2, 25))
        priors = r.random(2) + 0.1
        priors /= priors.sum()
        means = r.standard_normal((2, dim))
        variances = r.random((2, dim)) + 1e-3
        model = GaussianNBModel(priors, means, variances)
        swapped = GaussianNBModel(priors[::-1].copy(), means[::-1].copy(),
                                  variances[::-1].copy())
        vs = r.standard_normal((50, dim)) * 2.0
        total = nb.competence_batch(model, vs) + nb.competence_batch(swapped, vs)
        if not np.all(np.abs(total - 1.0) <= 1e-12):
            return False
    return True


def _check_f3_is_mean_f1(r):
    k, kp, m = 7, 5, 4
    nq = 250  # 250 queries x 4 members = 1000 meta vectors
    n_ref = 80
    roc = r.integers(0, n_ref, size=(nq, k)).astype(np.int64)
    prof = r.integers(0, n_ref, size=(nq, kp)).astype(np.int64)
    correct = (r.random((n_ref, m)) < 0.5).astype(np.uint8)
    post = r.random((n_ref, m))
    conf = r.random((nq, m))
    vs = kernels.assemble_meta(roc, prof, correct, post, conf, k, kp)
    return np.array_equal(vs[:, :, 2 * k], vs[:, :, :k].mean(axis=2))


def _check_vote_scale_invariance(r):
    preds = r.integers(1, 3, size=(1000, 7)).astype(np.int64)
    deltas = r.random((1000, 7)) + 0.01
    base = weighted_vote(preds, deltas)
    pow2 = np.exp2(r.integers(-3, 10, size=(1000, 1)).astype(np.float64))
    arbitrary = (r.random((1000, 1)) + 0.05) * 20.0
    return (np.array_equal(base, weighted_vote(preds, deltas * pow2))
            and np.array_equal(base, weighted_vote(preds, deltas * arbitrary)))


def _check_adaboost_weights(r):
    for kind in ("perceptron", "stump"):
        for trial in range(10):
            x = r.random((60, 2))
            y = np.where(r.random(60) < 0.5, 1, 2).astype(np.int64)
            y[0], y[1] = 1, 2  # both classes present
            data = Dataset(x, y, "T")
            model = adaboost_train(data, t=6, base_kind=kind,
                                   seed=int(r.integers(0, 10000)))
            w = np.full(len(data), 1.0 / len(data))
            for stage, alpha in zip(model.stages, model.alphas):
                if abs(w.sum() - 1.0) > 1e-12:
                    return False
                preds = stage.predict_batch(data.x)
                miss = preds != data.y
                eps = float(w[miss].sum())
                if eps >= 0.5:
                    return False
                clipped = min(max(eps, EPS_CLIP), 1.0 - EPS_CLIP)
                if abs(alpha - 0.5 * math.log((1.0 - clipped) / clipped)) > 1e-9:
                    return False
                ypm = np.where(data.y == 1, 1.0, -1.0)
                hpm = np.where(preds == 1, 1.0, -1.0)
                w = w * np.exp(-alpha * ypm * hpm)
                w = w / w.sum()
    return True


def _check_stump_exhaustive(r):
    for trial in range(100):
        n = int(r.integers(4, 51))
        x = r.random((n, 2))
        y = np.where(r.random(n) < 0.5, 1, 2).astype(np.int64)
        y[0], y[1] = 1, 2
        data = Dataset(x, y, "T")
        w = r.random(n) + 0.05 if trial % 2 else np.ones(n)
        stump = train_stump(data, weights=w)
        best, best_err = None, np.inf
        for feature in (0, 1):
            v = x[:, feature]
            distinct = np.unique(v)
            for thr in (distinct[:-1] + distinct[1:]) / 2.0:
                for pol in (1, -1):
                    side1 = v <= thr if pol == 1 else v >= thr
                    err = float(w[(side1 & (y == 2)) | (~side1 & (y == 1))].sum())
                    if err < best_err:
                        best, best_err = (feature, float(thr), pol), err
        if (stump.feature, stump.threshold, stump.polarity) != best:
            return False
    return True


def _check_save_load(system, tmp_path, r):
    path = tmp_path / "model.json"
    save_system(system, path)
    loaded = load_system(path)
    queries = r.random((1000, 2))
    return all(
        np.array_equal(classify_batch(system, method, queries),
                       classify_batch(loaded, method, queries))
        for method in METHODS if method != "oracle")


def test_criterion_10_property_suites(bench, tmp_path):
    r = np.random.default_rng(20240817)
    checks = {
        "neighbor oracles": _check_neighbor_oracles(r),
        "nb normalization": _check_nb_normalization(r),
        "f3 = mean(f1)": _check_f3_is_mean_f1(r),
        "vote scale invariance": _check_vote_scale_invariance(r),
        "adaboost weights": _check_adaboost_weights(r),
        "stump = exhaustive": _check_stump_exhaustive(r),
        "save/load round-trip": _check_save_load(bench["system0"], tmp_path, r),
    }
    failed = [name for name, ok in checks.items() if not ok]
    report(10, not failed,
           "all property suites passed" if not failed
           else f"failed: {', '.join(failed)}")
