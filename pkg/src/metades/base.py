"""Weak linear base classifiers: perceptron and decision stump.

Both expose the same three capabilities the rest of the system consumes:
a crisp prediction (`predict`), a calibrated class posterior (`posterior`),
and a perpendicular distance to the decision boundary
(`boundary_distance`), plus vectorized batch variants. Class labels are
1 and 2 throughout; every boundary tie resolves to class 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import kernels
from .datagen import Dataset

# Perceptron training schedule. Deliberately undertrained: a short online
# budget from a unit-scale random start keeps bagged members individually
# weak (~0.5 accuracy) yet mutually diverse, which is the pool regime the
# selection machinery is built for. Longer budgets collapse the members
# toward one near-optimal line and destroy ensemble coverage.
EPOCHS = 10
LEARNING_RATE = 1.0
INIT_SCALE = 1.0

# logistic steepness mapping signed boundary distance to a class posterior
KAPPA = 4.0


def _as_points(x) -> np.ndarray:
    pts = np.ascontiguousarray(x, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(1, 2)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("expected a point pair or an (n, 2) array")
    return pts


@dataclass(frozen=True)
class Perceptron:
    """Linear separator; the positive half-plane w.x + b >= 0 is class 1."""

    w: tuple[float, float]
    b: float

    def _activation(self, pts: np.ndarray) -> np.ndarray:
        return pts[:, 0] * self.w[0] + pts[:, 1] * self.w[1] + self.b

    def _norm(self) -> float:
        return float(np.hypot(self.w[0], self.w[1]))

    def predict_batch(self, x) -> np.ndarray:
        a = self._activation(_as_points(x))
        return np.where(a >= 0.0, 1, 2).astype(np.int64)

    def posterior1_batch(self, x) -> np.ndarray:
        # logistic over the signed perpendicular distance, so the posterior
        # is invariant under positive rescaling of (w, b)
        a = self._activation(_as_points(x)) / self._norm()
        return 1.0 / (1.0 + np.exp(-KAPPA * a))

    def distance_batch(self, x) -> np.ndarray:
        return np.abs(self._activation(_as_points(x))) / self._norm()

    def predict(self, point) -> int:
        return int(self.predict_batch(point)[0])

    def posterior(self, point, label: int) -> float:
        p1 = float(self.posterior1_batch(point)[0])
        return p1 if label == 1 else 1.0 - p1

    def boundary_distance(self, point) -> float:
        return float(self.distance_batch(point)[0])


@dataclass(frozen=True)
class DecisionStump:
    """Axis-aligned single split.

    polarity +1 assigns class 1 to x[feature] <= threshold, polarity -1 to
    x[feature] >= threshold; either way the boundary itself is class 1.
    `side_posteriors` holds one (P(class 1), P(class 2)) pair per side,
    ordered (class-1 side, class-2 side).
    """

    feature: int
    threshold: float
    polarity: int
    side_posteriors: tuple[tuple[float, float], tuple[float, float]]

    def _on_class1_side(self, pts: np.ndarray) -> np.ndarray:
        v = pts[:, self.feature]
        if self.polarity == 1:
            return v <= self.threshold
        return v >= self.threshold

    def predict_batch(self, x) -> np.ndarray:
        side1 = self._on_class1_side(_as_points(x))
        return np.where(side1, 1, 2).astype(np.int64)

    def posterior1_batch(self, x) -> np.ndarray:
        side1 = self._on_class1_side(_as_points(x))
        return np.where(side1, self.side_posteriors[0][0],
                        self.side_posteriors[1][0])

    def distance_batch(self, x) -> np.ndarray:
        pts = _as_points(x)
        return np.abs(pts[:, self.feature] - self.threshold)

    def predict(self, point) -> int:
        return int(self.predict_batch(point)[0])

    def posterior(self, point, label: int) -> float:
        p1 = float(self.posterior1_batch(point)[0])
        return p1 if label == 1 else 1.0 - p1

    def boundary_distance(self, point) -> float:
        return float(self.distance_batch(point)[0])


BaseClassifier = Union[Perceptron, DecisionStump]


def _check_weights(weights, n: int) -> np.ndarray:
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if w.shape != (n,):
        raise ValueError("need one weight per sample")
    if np.any(w < 0.0) or not np.any(w > 0.0):
        raise ValueError("weights must be non-negative and not all zero")
    return w


def train_perceptron(data: Dataset, weights=None, seed=0) -> Perceptron:
    """Online perceptron training for a fixed budget of epochs, returning
    the final weight vector. On non-separable data the endpoint of the
    update walk varies with the visit order, which is exactly what keeps a
    bagged pool of these members diverse.

    Per-sample weights are honored through a seeded bootstrap resample
    proportional to the weights (online updates have no native weighting).
    Deterministic given (data, weights, seed).
    """
    if len(np.unique(data.y)) < 2:
        raise ValueError("perceptron training needs both classes present")
    rng = np.random.default_rng(seed)
    x, y = data.x, data.y
    if weights is not None:
        p = _check_weights(weights, len(data))
        idx = rng.choice(len(data), size=len(data), replace=True, p=p / p.sum())
        x, y = x[idx], y[idx]
    init = rng.standard_normal(3) * INIT_SCALE
    orders = np.stack([rng.permutation(len(y)) for _ in range(EPOCHS)])
    ypm = np.where(y == 1, 1.0, -1.0)
    w0, w1, b = kernels.perceptron_epochs(x, ypm, orders, LEARNING_RATE, init)
    if w0 == 0.0 and w1 == 0.0:
        raise RuntimeError("perceptron training degenerated to a zero vector")
    return Perceptron((float(w0), float(w1)), float(b))


def _side_pair(y_side: np.ndarray) -> tuple[float, float]:
    # Laplace-smoothed class frequencies of one side (unweighted counts)
    n1 = int(np.sum(y_side == 1))
    n = y_side.size
    p1 = (n1 + 1.0) / (n + 2.0)
    return (p1, 1.0 - p1)


def train_stump(data: Dataset, weights=None) -> DecisionStump:
    """Exhaustive scan over both features, all midpoint thresholds of
    consecutive distinct values, and both polarities; returns the stump
    with minimal weighted 0-1 error. Ties keep the earliest candidate in
    scan order (feature 0 first, thresholds ascending, polarity +1 first).
    """
    n = len(data)
    w = np.full(n, 1.0) if weights is None else _check_weights(weights, n)
    x, y = data.x, data.y
    is1 = y == 1
    best = None
    best_err = np.inf
    for feature in (0, 1):
        v = x[:, feature]
        distinct = np.unique(v)
        if distinct.size < 2:
            continue
        thresholds = (distinct[:-1] + distinct[1:]) / 2.0
        low = v[None, :] <= thresholds[:, None]  # (ncand, n)
        # polarity +1: class 1 on the low side; errors are class-2 mass low
        # plus class-1 mass high. polarity -1 is the complement split.
        err_plus = ((low & ~is1) * w).sum(axis=1) + ((~low & is1) * w).sum(axis=1)
        err_minus = ((low & is1) * w).sum(axis=1) + ((~low & ~is1) * w).sum(axis=1)
        flat = np.stack([err_plus, err_minus], axis=1).ravel()
        m = int(np.argmin(flat))
        if flat[m] < best_err:
            best_err = float(flat[m])
            best = (feature, float(thresholds[m // 2]), 1 if m % 2 == 0 else -1)
    if best is None:
        raise ValueError("degenerate data: no split candidates on either feature")
    feature, threshold, polarity = best
    on1 = x[:, feature] <= threshold if polarity == 1 else x[:, feature] >= threshold
    side_posteriors = (_side_pair(y[on1]), _side_pair(y[~on1]))
    return DecisionStump(feature, threshold, polarity, side_posteriors)
