"""Backend selection: compiled kernels when available, NumPy otherwise.

The compiled extension is optional; building the package without a C
compiler silently falls back to ``_kernels_py``.  Both expose the same
functions with identical numerics.
"""

from __future__ import annotations

import numpy as np

try:  # pragma: no cover - exercised indirectly via tests/test_backends.py
    from . import _kernels as _impl

    BACKEND = "compiled"
except ImportError:  # pragma: no cover
    from . import _kernels_py as _impl

    BACKEND = "python"


def _prep(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=float)


def set_distance_points(points, X):
    return _impl.set_distance_points(_prep(points), _prep(X))


def mcshane_eval(points, values, lip, lo, hi, X):
    return _impl.mcshane_eval(_prep(points), _prep(values), float(lip), float(lo), float(hi), _prep(X))


def orbit_min_mcshane(mats, points, values, lip, lo, hi, X):
    return _impl.orbit_min_mcshane(
        _prep(mats), _prep(points), _prep(values), float(lip), float(lo), float(hi), _prep(X)
    )


def orbit_min_points(mats, points, X):
    return _impl.orbit_min_points(_prep(mats), _prep(points), _prep(X))
