"""Experiment harness: configured training runs, method evaluation, and
pool-size / selection-set-size sweeps emitting CSV result tables.

Accuracies are a pure function of (config, seed): rerunning a sweep
reproduces every CSV column except wall_time_s byte for byte. Sweep points
retrain from seeds derived deterministically from (run seed, point index),
so each point is independent but reproducible in isolation.
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import nb
from .baselines import adaboost_train
from .core import METHODS, TrainedSystem, evaluate
from .datagen import DEFAULT_SIZES, GenSpec, generate, read_csv
from .meta_features import (
    boundary_norms,
    build_meta_training_set,
    build_reference_cache,
)
from .persist import load_system, save_system
from .pool import bagging_generate

POOL_GRID = tuple(range(5, 101, 5))

DSEL_GRID = tuple(range(50, 1001, 50))

SWEEP_AXES = ("none", "pool", "dsel", "both")

RESULT_COLUMNS = ("method", "axis", "point", "seed", "accuracy",
                  "wall_time_s", "status")


@dataclass(frozen=True)
class ExperimentConfig:
    """One benchmark request: problem, pool, hyper-parameters, methods, seeds."""

    problem: str = "p2"
    base_kind: str = "perceptron"
    m: int = 5
    sizes: tuple[int, int, int, int] = DEFAULT_SIZES
    k: int = 7
    kp: int = 5
    h_c: float = 0.7
    upsilon: float = 0.5
    methods: tuple[str, ...] = ("metades_h",)
    seeds: tuple[int, ...] = (0,)
    sweep: str = "none"
    out_dir: str = "results"

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if self.problem not in ("p2", "xor"):
            raise ValueError(f"unknown problem {self.problem!r}")
        if self.base_kind not in ("perceptron", "stump"):
            raise ValueError(f"unknown base kind {self.base_kind!r}")
        if self.m < 1:
            raise ValueError("pool size must be at least 1")
        if len(self.sizes) != 4 or any(s <= 0 for s in self.sizes):
            raise ValueError("all four split sizes must be positive")
        if self.k < 1 or self.kp < 1:
            raise ValueError("neighborhood sizes must be at least 1")
        if not 0.5 < self.h_c <= 1.0:
            raise ValueError("h_c must lie in (0.5, 1.0]")
        if not 0.0 < self.upsilon < 1.0:
            raise ValueError("upsilon must lie in (0, 1)")
        if not self.methods:
            raise ValueError("at least one method is required")
        for method in self.methods:
            if method not in METHODS:
                raise ValueError(f"unknown method {method!r}")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.sweep not in SWEEP_AXES:
            raise ValueError(f"unknown sweep axis {self.sweep!r}")


class ResultRow(NamedTuple):
    method: str
    axis: str
    point: str
    seed: int
    accuracy: float | None  # None marks a failed point
    wall_time_s: float
    status: str


@contextmanager
def _stage(name: str):
    # any failure is re-raised with the pipeline stage in the message
    try:
        yield
    except Exception as exc:
        raise RuntimeError(f"{name} stage failed: {exc}") from exc


def _train_staged(config: ExperimentConfig, train, t_lambda, dsel, m: int,
                  seed, log: list[str]) -> TrainedSystem:
    """train_system with per-stage diagnostics and timing lines."""
    t0 = time.perf_counter()
    with _stage("overproduction"):
        pool = bagging_generate(train, m, config.base_kind, seed)
    log.append(f"overproduction: {m} {config.base_kind} members "
               f"({time.perf_counter() - t0:.3f}s)")
    t0 = time.perf_counter()
    with _stage("meta-training"):
        norms = boundary_norms(pool, t_lambda)
        meta = build_meta_training_set(t_lambda, pool, config.k, config.kp,
                                       config.h_c, norms)
    log.append(f"meta-training: {len(meta)} meta-examples of dimension "
               f"{meta.vectors.shape[1]} ({time.perf_counter() - t0:.3f}s)")
    t0 = time.perf_counter()
    with _stage("selector fit"):
        model = nb.fit(meta)
    log.append(f"selector fit: ({time.perf_counter() - t0:.3f}s)")
    t0 = time.perf_counter()
    with _stage("generalization setup"):
        cache = build_reference_cache(pool, dsel)
        booster = (adaboost_train(train, m, config.base_kind, seed)
                   if "adaboost" in config.methods else None)
        system = TrainedSystem(pool, model, dsel, cache, norms, config.k,
                               config.kp, config.h_c, config.upsilon, booster)
    log.append(f"generalization setup: ({time.perf_counter() - t0:.3f}s)")
    return system


def _generate_splits(config: ExperimentConfig, seed: int):
    with _stage("data generation"):
        return generate(GenSpec(config.problem, config.sizes, seed))


def run_train(config: ExperimentConfig, seed: int | None = None) -> TrainedSystem:
    """Full training pipeline; persists model.json and train.log in out_dir."""
    seed = config.seeds[0] if seed is None else seed
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    log = [f"problem={config.problem} base={config.base_kind} m={config.m} "
           f"sizes={config.sizes} k={config.k} kp={config.kp} "
           f"h_c={config.h_c} upsilon={config.upsilon} seed={seed}"]
    train, t_lambda, dsel, _ = _generate_splits(config, seed)
    system = _train_staged(config, train, t_lambda, dsel, config.m, seed, log)
    with _stage("persistence"):
        save_system(system, out / "model.json")
        (out / "train.log").write_text("\n".join(log) + "\n", encoding="ascii")
    return system


def _format_row(row: ResultRow) -> str:
    acc = "" if row.accuracy is None else repr(float(row.accuracy))
    return (f"{row.method},{row.axis},{row.point},{row.seed},"
            f"{acc},{row.wall_time_s:.3f},{row.status}")


def write_results(rows: list[ResultRow], path, append: bool = False) -> None:
    path = Path(path)
    fresh = not (append and path.exists())
    with open(path, "a" if append else "w", encoding="ascii") as fh:
        if fresh:
            fh.write(",".join(RESULT_COLUMNS) + "\n")
        for row in rows:
            fh.write(_format_row(row) + "\n")


def _evaluate_methods(system: TrainedSystem, methods, test, axis: str,
                      point: str, seed: int, train_dt: float) -> list[ResultRow]:
    rows = []
    for method in methods:
        t0 = time.perf_counter()
        acc = evaluate(system, method, test)
        dt = train_dt + time.perf_counter() - t0
        rows.append(ResultRow(method, axis, point, seed, acc, dt, "ok"))
    return rows


def run_eval(model_path, test_path, methods, out_dir, seed: int = 0) -> list[ResultRow]:
    """Evaluate a persisted model on a test CSV; appends to results.csv."""
    with _stage("evaluation setup"):
        system = load_system(model_path)
        test = read_csv(test_path, split="G")
    for method in methods:
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}")
    with _stage("evaluation"):
        rows = _evaluate_methods(system, methods, test, "none", "-", seed, 0.0)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_results(rows, out / "results.csv", append=True)
    return rows


def sweep_points(axis: str) -> list[tuple[int | None, int | None]]:
    """(pool size, selection-set size) pairs for a sweep axis; None = default."""
    if axis == "pool":
        return [(m, None) for m in POOL_GRID]
    if axis == "dsel":
        return [(None, d) for d in DSEL_GRID]
    if axis == "both":
        return [(m, d) for m in POOL_GRID for d in DSEL_GRID]
    raise ValueError(f"axis {axis!r} does not define sweep points")


def _point_tag(m_pt: int | None, d_pt: int | None) -> str:
    if m_pt is not None and d_pt is not None:
        return f"{m_pt}x{d_pt}"
    return str(m_pt if m_pt is not None else d_pt)


def run_sweep(config: ExperimentConfig) -> list[ResultRow]:
    """Retrain and evaluate at every sweep point for every seed.

    A failed point contributes rows with empty accuracy and the error text
    in the status column instead of aborting the sweep. Rows are written to
    results.csv sorted by (method, point, seed).
    """
    if config.sweep == "none":
        raise ValueError("config has no sweep axis; use run_train/run_eval")
    points = sweep_points(config.sweep)
    rows: list[ResultRow] = []
    order: dict[str, int] = {}
    for index, (m_pt, d_pt) in enumerate(points):
        tag = _point_tag(m_pt, d_pt)
        order[tag] = index
        m = config.m if m_pt is None else m_pt
        sizes = config.sizes if d_pt is None else (
            config.sizes[0], config.sizes[1], d_pt, config.sizes[3])
        for seed in config.seeds:
            t0 = time.perf_counter()
            try:
                train, t_lambda, dsel, test = generate(
                    GenSpec(config.problem, sizes, seed))
                # point-derived pool seed: independent yet reproducible
                system = _train_staged(config, train, t_lambda, dsel, m,
                                       (seed, index), [])
                train_dt = time.perf_counter() - t0
                rows.extend(_evaluate_methods(system, config.methods, test,
                                              config.sweep, tag, seed, train_dt))
            except Exception as exc:
                dt = time.perf_counter() - t0
                status = str(exc).replace(",", ";").replace("\n", " ")
                rows.extend(ResultRow(method, config.sweep, tag, seed, None,
                                      dt, status)
                            for method in config.methods)
    rows.sort(key=lambda r: (r.method, order[r.point], r.seed))
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_results(rows, out / "results.csv")
    return rows


def run_boundary(model_path, method: str, resolution: int, out_dir,
                 samples=None) -> None:
    """Rasterize a persisted model's decision regions to CSV + SVG."""
    from .boundary import decision_grid, render_svg, write_boundary_csv

    with _stage("boundary setup"):
        system = load_system(model_path)
    with _stage("boundary evaluation"):
        points, labels = decision_grid(system, method, resolution)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_boundary_csv(points, labels, out / "boundary.csv")
    render_svg(points, labels, resolution, out / "boundary.svg",
               samples=samples)
