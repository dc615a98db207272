"""Geometric kernels: anchor points, buffered gates, resampling and curve distances."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import AnalysisConfig, BoundingBox, Rect, Trajectory

__all__ = [
    "DistanceMethod",
    "DistanceResult",
    "anchor_point",
    "anchor_points",
    "gate_contains",
    "resample",
    "discrete_frechet",
    "hausdorff",
    "trajectory_distance",
    "pairwise_distances",
]


class DistanceMethod(str, Enum):
    FRECHET = "frechet"
    HAUSDORFF = "hausdorff"


@dataclass(frozen=True)
class DistanceResult:
    value: float
    method: DistanceMethod


def anchor_point(b: BoundingBox) -> tuple[float, float]:
    """Bottom-center of the box, used as the foot position."""
    return (b.x + b.w / 2.0, b.y + b.h)


def anchor_points(boxes: np.ndarray) -> np.ndarray:
    """Anchor points for an ``(n, 4)`` array of ``x, y, w, h`` rows."""
    boxes = np.asarray(boxes, dtype=np.float64).reshape(-1, 4)
    return np.column_stack([boxes[:, 0] + boxes[:, 2] / 2.0, boxes[:, 1] + boxes[:, 3]])


def gate_contains(b: BoundingBox, rect: Rect, tolerance: float) -> bool:
    """Whether the tolerance disk around the box centroid touches ``rect``.

    The disk radius is ``tolerance`` times the box diagonal. Touching the
    rectangle boundary counts as intersecting.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be non-negative")
    if rect.degenerate:
        return False
    cx, cy = b.centroid
    nx = min(max(cx, rect.x), rect.x + rect.w)
    ny = min(max(cy, rect.y), rect.y + rect.h)
    radius = tolerance * b.diagonal
    return (cx - nx) ** 2 + (cy - ny) ** 2 <= radius * radius


def gate_contains_many(boxes: np.ndarray, rect: Rect, tolerance: float) -> np.ndarray:
    """Vectorized :func:`gate_contains` over an ``(n, 4)`` box array."""
    boxes = np.asarray(boxes, dtype=np.float64).reshape(-1, 4)
    if rect.degenerate:
        return np.zeros(len(boxes), dtype=bool)
    x, y, w, h = boxes.T
    cx, cy = x + w / 2.0, y + h / 2.0
    nx = np.clip(cx, rect.x, rect.x + rect.w)
    ny = np.clip(cy, rect.y, rect.y + rect.h)
    radius = tolerance * np.hypot(w, h)
    return (cx - nx) ** 2 + (cy - ny) ** 2 <= radius * radius


def resample(traj: Trajectory, n: int) -> Trajectory:
    """Resample to ``n`` points equally spaced in arc length.

    Timestamps are interpolated linearly alongside positions. A path with
    zero length (e.g. a single sample) yields ``n`` copies of its first
    point; timestamps are then spread evenly over the original time span,
    or offset by 1 ms per point when the span is zero.
    """
    if n < 2:
        raise ValueError(f"resample needs n >= 2, got {n}")
    pts, ts = traj.points, traj.timestamps
    seg = np.hypot(*np.diff(pts, axis=0).T) if len(pts) > 1 else np.zeros(0)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]

    if total == 0.0:
        new_pts = np.repeat(pts[:1], n, axis=0)
        if ts[-1] > ts[0]:
            new_ts = np.linspace(ts[0], ts[-1], n)
        else:
            new_ts = ts[0] + np.arange(n, dtype=np.float64)
        return Trajectory(traj.track_id, new_ts, new_pts)

    # zero-length segments make cum non-strictly increasing; drop them
    keep = np.concatenate([[True], seg > 0])
    cum_k, pts_k, ts_k = cum[keep], pts[keep], ts[keep]

    targets = np.linspace(0.0, total, n)
    x = np.interp(targets, cum_k, pts_k[:, 0])
    y = np.interp(targets, cum_k, pts_k[:, 1])
    new_ts = np.interp(targets, cum_k, ts_k)
    x[0], y[0], new_ts[0] = pts[0, 0], pts[0, 1], ts[0]
    x[-1], y[-1], new_ts[-1] = pts[-1, 0], pts[-1, 1], ts[-1]
    new_ts = _strictly_increasing(new_ts)
    return Trajectory(traj.track_id, new_ts, np.column_stack([x, y]))


def _strictly_increasing(ts: np.ndarray) -> np.ndarray:
    # a stationary stretch maps several targets onto one timestamp
    out = ts.copy()
    for i in range(1, len(out)):
        if out[i] <= out[i - 1]:
            out[i] = np.nextafter(out[i - 1], np.inf)
    return out


def _as_points(P) -> np.ndarray:
    arr = np.asarray(P, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("point list must not be empty")
    return arr.reshape(-1, 2)


def _cdist(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    diff = P[:, None, :] - Q[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def discrete_frechet(P, Q) -> float:
    """Discrete Fréchet distance between two polylines.

    Parameters
    ----------
    P, Q : array_like
        ``(n, 2)`` and ``(m, 2)`` vertex arrays.

    Returns
    -------
    float
        Minimum over monotone couplings of the largest coupled Euclidean
        distance (Eiter and Mannila's dynamic program).

    Raises
    ------
    ValueError
        If either list is empty.

    Examples
    --------
    >>> discrete_frechet([[0, 0], [1, 0]], [[0, 1], [1, 1]])
    1.0
    """
    P, Q = _as_points(P), _as_points(Q)
    d = _cdist(P, Q)
    n, m = d.shape
    c = np.empty_like(d)
    c[:, 0] = np.maximum.accumulate(d[:, 0])
    c[0, :] = np.maximum.accumulate(d[0, :])
    for i in range(1, n):
        row, prev, di = c[i], c[i - 1], d[i]
        for j in range(1, m):
            best = min(prev[j], prev[j - 1], row[j - 1])
            row[j] = di[j] if di[j] > best else best
    return float(c[-1, -1])


def discrete_frechet_batch(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Fréchet distance for stacked pairs ``P[k]`` vs ``Q[k]``.

    ``P`` is ``(k, n, 2)`` and ``Q`` is ``(k, m, 2)``; the dynamic program
    runs once with every cell vectorized across the ``k`` pairs.
    """
    P = np.asarray(P, dtype=np.float64)
    Q = np.asarray(Q, dtype=np.float64)
    diff = P[:, :, None, :] - Q[:, None, :, :]
    d = np.hypot(diff[..., 0], diff[..., 1])
    k, n, m = d.shape
    c = np.empty_like(d)
    c[:, :, 0] = np.maximum.accumulate(d[:, :, 0], axis=1)
    c[:, 0, :] = np.maximum.accumulate(d[:, 0, :], axis=1)
    for i in range(1, n):
        for j in range(1, m):
            best = np.minimum(np.minimum(c[:, i - 1, j], c[:, i - 1, j - 1]), c[:, i, j - 1])
            c[:, i, j] = np.maximum(d[:, i, j], best)
    return c[:, -1, -1]


def hausdorff(P, Q) -> float:
    """Symmetric Hausdorff distance between two point sets (order ignored)."""
    P, Q = _as_points(P), _as_points(Q)
    d = _cdist(P, Q)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def hausdorff_batch(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    P = np.asarray(P, dtype=np.float64)
    Q = np.asarray(Q, dtype=np.float64)
    diff = P[:, :, None, :] - Q[:, None, :, :]
    d = np.hypot(diff[..., 0], diff[..., 1])
    return np.maximum(d.min(axis=2).max(axis=1), d.min(axis=1).max(axis=1))


def _method_for(n: int, m: int, budget: int) -> DistanceMethod:
    return DistanceMethod.FRECHET if n * m <= budget else DistanceMethod.HAUSDORFF


def trajectory_distance(P, Q, cfg: AnalysisConfig = AnalysisConfig()) -> DistanceResult:
    """Fréchet distance, or Hausdorff when the DP would exceed the cell budget.

    Accepts :class:`Trajectory` objects or plain point arrays.
    """
    p = P.points if isinstance(P, Trajectory) else _as_points(P)
    q = Q.points if isinstance(Q, Trajectory) else _as_points(Q)
    method = _method_for(len(p), len(q), cfg.frechet_cell_budget)
    if method is DistanceMethod.FRECHET:
        return DistanceResult(discrete_frechet(p, q), method)
    return DistanceResult(hausdorff(p, q), method)


def pairwise_distances(
    items,
    cfg: AnalysisConfig = AnalysisConfig(),
    chunk: int = 4096,
) -> tuple[np.ndarray, DistanceMethod]:
    """Symmetric distance matrix over equal-length point lists.

    Returns the matrix and the method used (all pairs share one method
    because all items have the same length).
    """
    arr = np.asarray([np.asarray(it, dtype=np.float64).reshape(-1, 2) for it in items])
    k = len(arr)
    out = np.zeros((k, k))
    if k < 2:
        return out, _method_for(arr.shape[1] if k else 0, arr.shape[1] if k else 0,
                                cfg.frechet_cell_budget)
    n = arr.shape[1]
    method = _method_for(n, n, cfg.frechet_cell_budget)
    kernel = discrete_frechet_batch if method is DistanceMethod.FRECHET else hausdorff_batch
    iu, ju = np.triu_indices(k, 1)
    for s in range(0, len(iu), chunk):
        a, b = iu[s:s + chunk], ju[s:s + chunk]
        vals = kernel(arr[a], arr[b])
        out[a, b] = vals
        out[b, a] = vals
    return out, method


def path_length(points) -> float:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) < 2:
        return 0.0
    return float(np.hypot(*np.diff(pts, axis=0).T).sum())


def circle_rect_distance(cx: float, cy: float, rect: Rect) -> float:
    """Distance from a point to a rectangle (0 inside)."""
    dx = max(rect.x - cx, 0.0, cx - (rect.x + rect.w))
    dy = max(rect.y - cy, 0.0, cy - (rect.y + rect.h))
    return math.hypot(dx, dy)
