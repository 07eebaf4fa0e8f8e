"""Sup-norm geometry: points, distances, and closed-set representations.

Points are 1-D float64 arrays, point sets are (m, n) arrays, and the metric
throughout is the sup norm max_i |x_i - y_i|.  Closed sets are represented
constructively (finite samples, boxes, sup-norm balls, finite unions), so
closedness holds by construction and every representation carries an exact
distance evaluator.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from . import _backend
from .errors import DimensionMismatch

# Entrywise tolerance under which two points count as the same point.
POINT_DEDUP_TOL = 1e-12


def as_point(x, dim: Optional[int] = None) -> np.ndarray:
    """Coerce ``x`` to a finite 1-D float64 point, optionally checking its dimension."""
    p = np.asarray(x, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise ValueError(f"a point must be a 1-D sequence of reals, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point coordinates must be finite (no NaN or infinity)")
    if dim is not None and p.shape[0] != dim:
        raise DimensionMismatch(f"point has dimension {p.shape[0]}, expected {dim}")
    return p


def as_points(xs, dim: Optional[int] = None) -> np.ndarray:
    """Coerce ``xs`` to a non-empty (m, n) float64 array of finite points."""
    pts = np.asarray(xs, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
        raise ValueError(f"expected a non-empty (m, n) array of points, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("point coordinates must be finite (no NaN or infinity)")
    if dim is not None and pts.shape[1] != dim:
        raise DimensionMismatch(f"points have dimension {pts.shape[1]}, expected {dim}")
    return pts


def sup_distance(x, y) -> float:
    """max_i |x_i - y_i|; zero iff x == y."""
    x = as_point(x)
    y = as_point(y)
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatch(
            f"sup_distance needs equal dimensions, got {x.shape[0]} and {y.shape[0]}"
        )
    return float(np.max(np.abs(x - y)))


class ClosedSet:
    """Base class for constructive closed subsets of R^n."""

    ambient_dim: int

    def distance(self, x) -> float:
        """Sup-norm distance from ``x`` to the set; zero iff x is a member."""
        x = as_point(x, self.ambient_dim)
        return float(self.distance_batch(x[None, :])[0])

    def distance_batch(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def densify(self, resolution: float) -> np.ndarray:
        """Points on the set with sup-norm spacing at most ``resolution``."""
        raise NotImplementedError


class FiniteSample(ClosedSet):
    """A finite, hence closed, set of points."""

    def __init__(self, points):
        pts = as_points(points)
        pts.setflags(write=False)
        self.points = pts
        self.ambient_dim = pts.shape[1]

    def distance_batch(self, X):
        X = np.ascontiguousarray(X, dtype=float)
        return _backend.set_distance_points(self.points, X)

    def densify(self, resolution):
        return self.points.copy()

    def __repr__(self):
        return f"FiniteSample({self.points.shape[0]} points, dim={self.ambient_dim})"


class Box(ClosedSet):
    """Axis-aligned closed box [lower, upper] (a product of closed intervals)."""

    def __init__(self, lower, upper):
        lo = as_point(lower)
        hi = as_point(upper, lo.shape[0])
        if np.any(lo > hi):
            raise ValueError("box needs lower <= upper componentwise")
        lo.setflags(write=False)
        hi.setflags(write=False)
        self.lower = lo
        self.upper = hi
        self.ambient_dim = lo.shape[0]

    def distance_batch(self, X):
        # Per-axis distance to the interval, then the max across axes: the
        # sup distance to a product set is the max of the factor distances.
        under = self.lower[None, :] - X
        over = X - self.upper[None, :]
        per_axis = np.maximum(np.maximum(under, over), 0.0)
        return per_axis.max(axis=1)

    def densify(self, resolution):
        if resolution <= 0:
            raise ValueError("resolution must be positive")
        axes = []
        for lo, hi in zip(self.lower, self.upper):
            span = hi - lo
            count = max(2, int(np.ceil(span / resolution)) + 1) if span > 0 else 1
            axes.append(np.linspace(lo, hi, count))
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def __repr__(self):
        return f"Box({self.lower.tolist()}, {self.upper.tolist()})"


class SupBall(ClosedSet):
    """Closed sup-norm ball, i.e. the cube {y : max_i |y_i - c_i| <= r}."""

    def __init__(self, center, radius):
        c = as_point(center)
        r = float(radius)
        if not (r > 0 and np.isfinite(r)):
            raise ValueError("radius must be a positive finite real")
        c.setflags(write=False)
        self.center = c
        self.radius = r
        self.ambient_dim = c.shape[0]

    def distance_batch(self, X):
        d = np.abs(X - self.center[None, :]).max(axis=1)
        return np.maximum(d - self.radius, 0.0)

    def densify(self, resolution):
        return Box(self.center - self.radius, self.center + self.radius).densify(resolution)

    def __repr__(self):
        return f"SupBall(center={self.center.tolist()}, radius={self.radius})"


class UnionSet(ClosedSet):
    """Finite union of closed sets (closed because the union is finite)."""

    def __init__(self, members: Sequence[ClosedSet]):
        members = list(members)
        if not members:
            raise ValueError("union needs at least one member")
        dim = members[0].ambient_dim
        for m in members[1:]:
            if m.ambient_dim != dim:
                raise DimensionMismatch("all union members must share the ambient dimension")
        self.members = tuple(members)
        self.ambient_dim = dim

    def distance_batch(self, X):
        return np.min([m.distance_batch(X) for m in self.members], axis=0)

    def densify(self, resolution):
        pts = np.vstack([m.densify(resolution) for m in self.members])
        return dedup_points(pts)

    def __repr__(self):
        return f"UnionSet({list(self.members)})"


def set_distance(S: ClosedSet, x) -> float:
    """inf over a in S of sup_distance(x, a), via the representation's closed form."""
    x = as_point(x, S.ambient_dim)
    return S.distance(x)


def dedup_points(points: np.ndarray, tol: float = POINT_DEDUP_TOL) -> np.ndarray:
    """Drop rows that repeat an earlier row entrywise within ``tol``, keeping first occurrences."""
    pts = as_points(points)
    keys = np.round(pts / tol).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    keep = np.sort(first)
    return pts[keep]
