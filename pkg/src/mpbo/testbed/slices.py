"""Two-dimensional slices of reward landscapes and their CSV form."""

from __future__ import annotations

import csv
import io

import numpy as np

__all__ = ["slice_points", "landscape_grid_dump", "grid_csv", "N_EVAL"]

N_EVAL = 15  # rollouts averaged per grid cell


def slice_points(resolution: int, dim: int, lower: float = 0.5, upper: float = 1.5):
    """Grid axes and the box points of the tied slice, ``y`` outer and ``x`` inner.

    For 4-D inputs the slice ties parameters in pairs, ``[x, x, y, y]``; for
    2-D inputs it is the plane itself.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    if dim not in (2, 4):
        raise ValueError(f"no tied slice defined for dimension {dim}")
    axis = np.linspace(lower, upper, resolution)
    Y, X = np.meshgrid(axis, axis, indexing="ij")
    xs, ys = X.ravel(), Y.ravel()
    if dim == 4:
        pts = np.column_stack([xs, xs, ys, ys])
    else:
        pts = np.column_stack([xs, ys])
    return xs, ys, pts


def landscape_grid_dump(evaluator, resolution: int, n_eval: int = N_EVAL) -> list[tuple[float, float, float]]:
    """Rows ``(x, y, reward)`` of the tied slice, each reward averaged over ``n_eval`` rollouts."""
    dim = evaluator.box.dim
    xs, ys, pts = slice_points(resolution, dim, evaluator.box.lower[0], evaluator.box.upper[0])
    if hasattr(evaluator, "averaged"):
        rewards = evaluator.averaged(pts, n_eval)
    else:
        rewards = np.array([np.mean([evaluator(p) for _ in range(n_eval)]) for p in pts])
    return [(float(x), float(y), float(r)) for x, y, r in zip(xs, ys, rewards)]


def grid_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "reward"])
    for x, y, r in rows:
        w.writerow([f"{x:.9g}", f"{y:.9g}", f"{r:.9g}"])
    return buf.getvalue()
