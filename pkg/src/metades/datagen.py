"""Synthetic two-class 2-D problems and dataset I/O.

Two generators are provided. The "p2" problem labels points of the square by
how many of four fixed polynomial/trigonometric curves pass below them (odd
count -> class 1), which carves each class into several disjoint regions of
roughly equal total area. The "xor" problem labels the four quadrants of the
unit square in a checkerboard. Both emit four splits: T (classifier
training), T_lambda (meta-training), DSEL (dynamic selection set) and G
(test).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np

SPLIT_TAGS = ("T", "T_lambda", "DSEL", "G")

DEFAULT_SIZES = (500, 500, 500, 2000)

P2_DOMAIN = 10.0  # native curve domain is [0, 10]^2; samples are scaled to [0, 1]^2


class Sample(NamedTuple):
    x: tuple[float, float]
    label: int


@dataclass(frozen=True)
class Dataset:
    """Immutable labeled point set; coordinates (n, 2), labels in {1, 2}."""

    x: np.ndarray
    y: np.ndarray
    split: str = ""

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=np.float64)
        y = np.ascontiguousarray(self.y, dtype=np.int64)
        if x.ndim != 2 or x.shape[1] != 2 or x.shape[0] == 0:
            raise ValueError("dataset needs a non-empty (n, 2) coordinate array")
        if y.shape != (x.shape[0],):
            raise ValueError("labels must be one per sample")
        if not np.all(np.isfinite(x)):
            raise ValueError("coordinates must be finite")
        if not np.all((y == 1) | (y == 2)):
            raise ValueError("labels must be 1 or 2")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.x.shape[0]

    def samples(self) -> Iterator[Sample]:
        for (a, b), lab in zip(self.x, self.y):
            yield Sample((float(a), float(b)), int(lab))

    @classmethod
    def from_samples(cls, samples: Sequence[Sample], split: str = "") -> "Dataset":
        x = np.array([s.x for s in samples], dtype=np.float64)
        y = np.array([s.label for s in samples], dtype=np.int64)
        return cls(x, y, split)


@dataclass(frozen=True)
class GenSpec:
    """Generation request: which problem, how many samples per split, seed."""

    problem: str
    sizes: tuple[int, int, int, int] = DEFAULT_SIZES
    seed: int = 0

    def __post_init__(self):
        if self.problem not in ("p2", "xor"):
            raise ValueError(f"unknown problem {self.problem!r}")
        if len(self.sizes) != 4 or any(int(s) <= 0 for s in self.sizes):
            raise ValueError("all four split sizes must be positive")
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))


def p2_boundary_values(x):
    """Heights of the four boundary curves at x (scalar or array), x in [0, 10]."""
    e1 = np.sin(x) + 5.0
    e2 = (x - 2.0) ** 2 + 1.0
    e3 = -0.1 * x ** 2 + 0.6 * np.sin(4.0 * x) + 8.0
    e4 = (x - 10.0) ** 2 / 2.0 + 7.902
    return e1, e2, e3, e4


def _p2_labels(points: np.ndarray) -> np.ndarray:
    """Vectorized parity labeling over native [0, 10]^2 coordinates."""
    x = points[:, 0]
    y = points[:, 1]
    below = sum((y > e).astype(np.int64) for e in p2_boundary_values(x))
    return np.where(below % 2 == 1, 1, 2).astype(np.int64)


def p2_label(point) -> int:
    """Class of one point in the native [0, 10]^2 domain.

    A point is class 1 when an odd number of the four curves lies strictly
    below it; the complementary (even) set is class 2. Raises ValueError
    outside the domain.
    """
    px, py = float(point[0]), float(point[1])
    if not (math.isfinite(px) and math.isfinite(py)):
        raise ValueError("point must be finite")
    if not (0.0 <= px <= P2_DOMAIN and 0.0 <= py <= P2_DOMAIN):
        raise ValueError(f"point {(px, py)} outside [0, {P2_DOMAIN}]^2")
    return int(_p2_labels(np.array([[px, py]]))[0])


def xor_label(point) -> int:
    """Quadrant checkerboard of the unit square: class 1 where the signs of
    (x - 0.5) and (y - 0.5) agree. Points on a quadrant boundary have no
    class (generation resamples them); here they fall back to class 2."""
    s = (float(point[0]) - 0.5) * (float(point[1]) - 0.5)
    return 1 if s > 0.0 else 2


def _split_rngs(seed: int) -> list[np.random.Generator]:
    # One child stream per split: split contents do not depend on the sizes
    # of the other splits (DSEL-size sweeps keep T/T_lambda/G fixed).
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(4)]


def gen_p2(spec: GenSpec):
    """Generate the four P2 splits, uniformly over the square, scaled to [0, 1]^2."""
    out = []
    for tag, size, rng in zip(SPLIT_TAGS, spec.sizes, _split_rngs(spec.seed)):
        native = rng.uniform(0.0, P2_DOMAIN, size=(size, 2))
        labels = _p2_labels(native)
        out.append(Dataset(native / P2_DOMAIN, labels, tag))
    return tuple(out)


def _gen_xor_split(rng: np.random.Generator, size: int, tag: str) -> Dataset:
    # Stratified: exactly floor/ceil half per class; boundary points rejected.
    want = {1: (size + 1) // 2, 2: size // 2}
    got = {1: 0, 2: 0}
    xs = np.empty((size, 2), dtype=np.float64)
    ys = np.empty(size, dtype=np.int64)
    filled = 0
    while filled < size:
        batch = rng.uniform(0.0, 1.0, size=(max(64, size), 2))
        prod = (batch[:, 0] - 0.5) * (batch[:, 1] - 0.5)
        for p, s in zip(batch, prod):
            if s == 0.0:
                continue
            lab = 1 if s > 0.0 else 2
            if got[lab] < want[lab]:
                xs[filled] = p
                ys[filled] = lab
                got[lab] += 1
                filled += 1
                if filled == size:
                    break
    return Dataset(xs, ys, tag)


def gen_xor(spec: GenSpec):
    """Generate the four XOR splits with exact per-class stratification."""
    return tuple(
        _gen_xor_split(rng, size, tag)
        for tag, size, rng in zip(SPLIT_TAGS, spec.sizes, _split_rngs(spec.seed))
    )


def generate(spec: GenSpec):
    return gen_p2(spec) if spec.problem == "p2" else gen_xor(spec)


def write_csv(dataset: Dataset, path, header: bool = False) -> None:
    """Write one `x1,x2,label` row per sample (shortest round-trip floats)."""
    with open(path, "w", encoding="ascii") as fh:
        if header:
            fh.write("x1,x2,label\n")
        for (a, b), lab in zip(dataset.x, dataset.y):
            fh.write(f"{float(a)!r},{float(b)!r},{int(lab)}\n")


def read_csv(path, split: str = "") -> Dataset:
    """Read a dataset written by `write_csv`; a header row is skipped if present."""
    xs: list[tuple[float, float]] = []
    ys: list[int] = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected x1,x2,label")
            try:
                a, b = float(parts[0]), float(parts[1])
                lab = int(parts[2])
            except ValueError:
                if lineno == 1:
                    continue  # header row
                raise ValueError(f"{path}:{lineno}: malformed row {line!r}") from None
            if lab not in (1, 2):
                raise ValueError(f"{path}:{lineno}: label {lab} outside {{1,2}}")
            xs.append((a, b))
            ys.append(lab)
    if not xs:
        raise ValueError(f"{path}: no samples")
    return Dataset(np.array(xs), np.array(ys), split)
