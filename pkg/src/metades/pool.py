"""Pool generation by bagging, plus pool-level caches and diagnostics.

A pool is an ordered sequence of trained weak classifiers with ids 1..M.
The decision matrix caches every member's crisp prediction on a dataset;
the oracle and single-best diagnostics bound what any selector built on
the pool can achieve.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .base import BaseClassifier, train_perceptron, train_stump
from .datagen import Dataset

BASE_KINDS = ("perceptron", "stump")

REDRAW_LIMIT = 10  # single-class bootstrap retries before giving up


@dataclass(frozen=True)
class Pool:
    """Ordered classifier pool; member i has id i+1."""

    classifiers: tuple[BaseClassifier, ...]

    def __post_init__(self):
        if len(self.classifiers) < 1:
            raise ValueError("pool needs at least one classifier")

    def __len__(self) -> int:
        return len(self.classifiers)

    def __getitem__(self, i: int) -> BaseClassifier:
        return self.classifiers[i]


def bagging_generate(train: Dataset, m: int, base_kind: str, seed) -> Pool:
    """Train M members, each on its own bootstrap replicate of `train`.

    Replicates are |train| draws with replacement; a replicate that comes
    back single-class is redrawn up to REDRAW_LIMIT times. Deterministic
    given (train, m, base_kind, seed), and member k's replicate does not
    depend on m.
    """
    if m < 1:
        raise ValueError("pool size must be at least 1")
    if base_kind not in BASE_KINDS:
        raise ValueError(f"unknown base kind {base_kind!r}")
    n = len(train)
    members = []
    for child in np.random.SeedSequence(seed).spawn(m):
        rng = np.random.default_rng(child)
        for attempt in range(REDRAW_LIMIT + 1):
            idx = rng.integers(0, n, size=n)
            if len(np.unique(train.y[idx])) == 2:
                break
        else:
            raise RuntimeError(
                f"bootstrap produced a single-class replicate "
                f"{REDRAW_LIMIT + 1} times in a row")
        replicate = Dataset(train.x[idx], train.y[idx])
        if base_kind == "perceptron":
            members.append(train_perceptron(replicate, seed=rng))
        else:
            members.append(train_stump(replicate))
    return Pool(tuple(members))


def decision_matrix(pool: Pool, data: Dataset) -> np.ndarray:
    """(|data|, M) crisp predictions; row j is the output profile of x_j."""
    cols = [c.predict_batch(data.x) for c in pool.classifiers]
    return np.stack(cols, axis=1)


def posterior1_matrix(pool: Pool, data: Dataset) -> np.ndarray:
    """(|data|, M) per-member P(class 1 | x) companion to decision_matrix."""
    cols = [c.posterior1_batch(data.x) for c in pool.classifiers]
    return np.stack(cols, axis=1)


def oracle_accuracy(pool: Pool, data: Dataset) -> float:
    """Fraction of samples at least one member classifies correctly."""
    dm = decision_matrix(pool, data)
    return float(np.mean(np.any(dm == data.y[:, None], axis=1)))


def single_best(pool: Pool, validation: Dataset) -> tuple[int, float]:
    """(1-based id, accuracy) of the individually best member; ties keep
    the lowest id."""
    dm = decision_matrix(pool, validation)
    accs = np.mean(dm == validation.y[:, None], axis=0)
    best = int(np.argmax(accs))
    return best + 1, float(accs[best])
