"""Decision-boundary rasterization over the unit square.

A resolution-r grid places r evenly spaced values (endpoints included) on
each axis and classifies all r^2 points, giving a dense picture of where a
method changes its mind. Output is a plain CSV and a self-contained SVG
written without any plotting dependency: tiles are run-length merged per
row so the file stays small at high resolutions.
"""

from __future__ import annotations

import numpy as np

from .core import classify_batch
from .datagen import Dataset

SVG_SIZE = 500.0

CLASS_COLORS = {1: "#4e79a7", 2: "#f28e2b"}


def grid_points(resolution: int) -> np.ndarray:
    """All (x, y) grid coordinates, y-major then x, shape (resolution^2, 2)."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    axis = np.linspace(0.0, 1.0, resolution)
    xs, ys = np.meshgrid(axis, axis)
    return np.column_stack([xs.ravel(), ys.ravel()])


def decision_grid(sys, method: str, resolution: int):
    """Classify every grid point; returns (points, labels)."""
    points = grid_points(resolution)
    return points, classify_batch(sys, method, points)


def write_boundary_csv(points: np.ndarray, labels: np.ndarray, path) -> None:
    if len(points) != len(labels):
        raise ValueError("one label per grid point")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("x,y,label\n")
        for (x, y), lab in zip(points, labels):
            fh.write(f"{float(x)!r},{float(y)!r},{int(lab)}\n")


def _fmt(v: float) -> str:
    out = f"{v:.3f}".rstrip("0").rstrip(".")
    return out if out else "0"


def render_svg(points: np.ndarray, labels: np.ndarray, resolution: int,
               path, samples: Dataset | None = None) -> None:
    """Two-color tile map of the grid labels, optional sample overlay."""
    if len(points) != resolution * resolution or len(labels) != len(points):
        raise ValueError("grid size does not match the stated resolution")
    grid = np.asarray(labels, dtype=np.int64).reshape(resolution, resolution)
    if not np.all((grid == 1) | (grid == 2)):
        raise ValueError("labels must be 1 or 2")
    cell = SVG_SIZE / resolution
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(SVG_SIZE)}" '
        f'height="{_fmt(SVG_SIZE)}" viewBox="0 0 {_fmt(SVG_SIZE)} {_fmt(SVG_SIZE)}">'
    ]
    for iy in range(resolution):
        top = SVG_SIZE - (iy + 1) * cell  # SVG y runs downward
        row = grid[iy]
        ix = 0
        while ix < resolution:
            run = ix
            while run < resolution and row[run] == row[ix]:
                run += 1
            parts.append(
                f'<rect x="{_fmt(ix * cell)}" y="{_fmt(top)}" '
                f'width="{_fmt((run - ix) * cell)}" height="{_fmt(cell)}" '
                f'fill="{CLASS_COLORS[int(row[ix])]}"/>')
            ix = run
    if samples is not None:
        for (x, y), lab in zip(samples.x, samples.y):
            parts.append(
                f'<circle cx="{_fmt(float(x) * SVG_SIZE)}" '
                f'cy="{_fmt(SVG_SIZE - float(y) * SVG_SIZE)}" r="3" '
                f'fill="{CLASS_COLORS[int(lab)]}" '
                f'stroke="#222222" stroke-width="0.6"/>')
    parts.append("</svg>")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(parts) + "\n")
