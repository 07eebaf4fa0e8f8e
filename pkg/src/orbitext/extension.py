"""Continuous extension of labeled data from a closed set to all of R^n.

The extension is the clipped McShane formula

    F(x) = clip( min_i (v_i + L * supdist(x, p_i)),  [min v, max v] )

for a Lipschitz constant L at least the empirical constant of the data.  F
is L-Lipschitz in the sup norm, reproduces every sample exactly, and stays
inside the data range.  The formula is exact and O(m) per query, which keeps
the whole construction auditable.
"""

from __future__ import annotations

from typing import Callable, Optional, Tuple

import numpy as np

from . import _backend
from .geometry import POINT_DEDUP_TOL, as_point, as_points

# Two samples closer than POINT_DEDUP_TOL must agree in value within this.
VALUE_CONSISTENCY_TOL = 1e-9


class ScalarField:
    """An evaluable real-valued function on R^n with optional metadata.

    ``lipschitz``, when present, is a sup-norm Lipschitz constant; ``bounds``
    is an optional (lo, hi) range the field stays inside.  ``batch_fn``, when
    given, must agree with ``fn`` bitwise on every row.
    """

    def __init__(
        self,
        fn: Callable[[np.ndarray], float],
        domain_dim: int,
        lipschitz: Optional[float] = None,
        bounds: Optional[Tuple[float, float]] = None,
        batch_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ):
        if domain_dim < 1:
            raise ValueError("domain_dim must be at least 1")
        if lipschitz is not None and not (lipschitz >= 0 and np.isfinite(lipschitz)):
            raise ValueError("lipschitz must be a finite nonnegative real")
        if bounds is not None:
            lo, hi = float(bounds[0]), float(bounds[1])
            if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
                raise ValueError("bounds must be a finite pair with lo <= hi")
            bounds = (lo, hi)
        self._fn = fn
        self._batch_fn = batch_fn
        self.domain_dim = int(domain_dim)
        self.lipschitz = None if lipschitz is None else float(lipschitz)
        self.bounds = bounds

    def eval(self, x) -> float:
        x = as_point(x, self.domain_dim)
        v = float(self._fn(x))
        if not np.isfinite(v):
            raise ValueError(f"field evaluated to a non-finite value at {x.tolist()}")
        return v

    def eval_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self._batch_fn is not None:
            return np.asarray(self._batch_fn(X), dtype=float)
        return np.array([self.eval(row) for row in X])

    def __call__(self, x) -> float:
        return self.eval(x)


class McShaneField(ScalarField):
    """The clipped McShane extension of a finite labeled sample."""

    def __init__(self, points: np.ndarray, values: np.ndarray, lipschitz: float):
        points = as_points(points)
        values = np.asarray(values, dtype=float)
        lo, hi = float(values.min()), float(values.max())
        points.setflags(write=False)
        values.setflags(write=False)
        self.points = points
        self.values = values
        super().__init__(
            fn=self._eval_one,
            domain_dim=points.shape[1],
            lipschitz=float(lipschitz),
            bounds=(lo, hi),
        )

    def _eval_one(self, x: np.ndarray) -> float:
        return self.eval_batch(x[None, :])[0]

    def eval_batch(self, X: np.ndarray) -> np.ndarray:
        lo, hi = self.bounds
        return _backend.mcshane_eval(self.points, self.values, self.lipschitz, lo, hi, X)


class SetDistanceField(ScalarField):
    """Sup-norm distance to a closed set, as a 1-Lipschitz evaluable field."""

    def __init__(self, closed_set):
        self.closed_set = closed_set
        super().__init__(
            fn=closed_set.distance,
            domain_dim=closed_set.ambient_dim,
            lipschitz=1.0,
            batch_fn=closed_set.distance_batch,
        )


class LabeledSample:
    """Points of a closed set paired with real values.

    Near-duplicate points (within POINT_DEDUP_TOL entrywise) must carry
    values within VALUE_CONSISTENCY_TOL; anything else is contradictory data.
    """

    def __init__(self, points, values):
        pts = as_points(points)
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1 or vals.shape[0] != pts.shape[0]:
            raise ValueError(
                f"values must be a flat list matching the {pts.shape[0]} points, "
                f"got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("sample values must be finite")
        _check_consistency(pts, vals)
        pts.setflags(write=False)
        vals.setflags(write=False)
        self.points = pts
        self.values = vals

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def __repr__(self):
        return f"LabeledSample({len(self)} points, dim={self.dim})"


def _pairwise_sup(points: np.ndarray) -> np.ndarray:
    return np.abs(points[:, None, :] - points[None, :, :]).max(axis=2)


def _check_consistency(points: np.ndarray, values: np.ndarray) -> None:
    d = _pairwise_sup(points)
    dv = np.abs(values[:, None] - values[None, :])
    bad = (d < POINT_DEDUP_TOL) & (dv > VALUE_CONSISTENCY_TOL)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise ValueError(
            f"inconsistent sample: points {i} and {j} coincide within {POINT_DEDUP_TOL} "
            f"but carry values {values[i]} and {values[j]}"
        )


def estimate_lipschitz(data: LabeledSample) -> float:
    """Largest value slope over sample pairs; 0 for single-point or constant data."""
    if len(data) < 2:
        return 0.0
    d = _pairwise_sup(data.points)
    dv = np.abs(data.values[:, None] - data.values[None, :])
    mask = d >= POINT_DEDUP_TOL
    if not np.any(mask):
        return 0.0
    return float(np.max(dv[mask] / d[mask]))


def mcshane_extend(data: LabeledSample, lipschitz: Optional[float] = None) -> McShaneField:
    """Extend ``data`` to all of R^n with Lipschitz constant ``lipschitz``.

    The constant defaults to the empirical estimate and may exceed it (user
    headroom) but not fall below it, otherwise the extension would fail to
    reproduce the samples.
    """
    est = estimate_lipschitz(data)
    L = est if lipschitz is None else float(lipschitz)
    if not np.isfinite(L):
        raise ValueError("lipschitz must be finite")
    if L < est:
        raise ValueError(
            f"lipschitz constant {L} is below the empirical constant {est}; "
            "the extension would not reproduce the data"
        )
    return McShaneField(data.points, data.values, L)
