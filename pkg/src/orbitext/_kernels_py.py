"""Pure-NumPy implementations of the hot evaluation kernels.

These are the import-time fallback for the compiled extension in
``orbitext._kernels``.  Both implementations evaluate the same formulas with
the same operation order (the extension is compiled with FMA contraction
disabled), so results agree bitwise; ``tests/test_backends.py`` pins that.

Shapes: ``mats`` is (k, n, n), ``points`` is (m, n), ``values`` is (m,),
``X`` is (q, n).  All arrays are float64 and C-contiguous.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

# Cap on float64 temporaries per chunk, ~32 MB.
_CHUNK_FLOATS = 1 << 22


def _chunk(q: int, per_row: int) -> int:
    return max(1, _CHUNK_FLOATS // max(1, per_row))


def set_distance_points(points: np.ndarray, X: np.ndarray) -> np.ndarray:
    """For each row x of X, min over rows a of points of max_i |x_i - a_i|."""
    q = X.shape[0]
    m, n = points.shape
    out = np.empty(q)
    step = _chunk(q, m * n)
    for s in range(0, q, step):
        blk = X[s : s + step]
        d = np.abs(blk[:, None, :] - points[None, :, :]).max(axis=2)
        out[s : s + step] = d.min(axis=1)
    return out


def mcshane_eval(
    points: np.ndarray,
    values: np.ndarray,
    lip: float,
    lo: float,
    hi: float,
    X: np.ndarray,
) -> np.ndarray:
    """clip(min_i (values_i + lip * supdist(x, points_i)), lo, hi) for each row x of X."""
    q = X.shape[0]
    m, n = points.shape
    out = np.empty(q)
    step = _chunk(q, m * n)
    for s in range(0, q, step):
        blk = X[s : s + step]
        d = np.abs(blk[:, None, :] - points[None, :, :]).max(axis=2)
        out[s : s + step] = (values[None, :] + lip * d).min(axis=1)
    np.clip(out, lo, hi, out=out)
    return out


def _orbit_images(mats: np.ndarray, blk: np.ndarray) -> np.ndarray:
    # (blk @ mats^T)[k, b] == mats[k] @ blk[b]; shape (k, B, n).
    return np.matmul(blk, mats.transpose(0, 2, 1))


def orbit_min_mcshane(
    mats: np.ndarray,
    points: np.ndarray,
    values: np.ndarray,
    lip: float,
    lo: float,
    hi: float,
    X: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Minimum over net elements g of the McShane field at g @ x.

    Returns (values, indices); ``indices[b]`` is the first net index attaining
    the minimum for row b of X.
    """
    q = X.shape[0]
    k = mats.shape[0]
    m, n = points.shape
    out = np.empty(q)
    idx = np.empty(q, dtype=np.intp)
    step = _chunk(q, k * m * n)
    for s in range(0, q, step):
        blk = X[s : s + step]
        img = _orbit_images(mats, blk)  # (k, B, n)
        d = np.abs(img[:, :, None, :] - points[None, None, :, :]).max(axis=3)  # (k, B, m)
        per_g = (values[None, None, :] + lip * d).min(axis=2)  # (k, B)
        np.clip(per_g, lo, hi, out=per_g)
        j = per_g.argmin(axis=0)  # first occurrence wins ties
        idx[s : s + step] = j
        out[s : s + step] = per_g[j, np.arange(blk.shape[0])]
    return out, idx


def orbit_min_points(
    mats: np.ndarray,
    points: np.ndarray,
    X: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Minimum over net elements g of the sup distance from g @ x to ``points``."""
    q = X.shape[0]
    k = mats.shape[0]
    m, n = points.shape
    out = np.empty(q)
    idx = np.empty(q, dtype=np.intp)
    step = _chunk(q, k * m * n)
    for s in range(0, q, step):
        blk = X[s : s + step]
        img = _orbit_images(mats, blk)
        d = np.abs(img[:, :, None, :] - points[None, None, :, :]).max(axis=3)
        per_g = d.min(axis=2)
        j = per_g.argmin(axis=0)
        idx[s : s + step] = j
        out[s : s + step] = per_g[j, np.arange(blk.shape[0])]
    return out, idx
