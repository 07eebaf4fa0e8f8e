# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled hot-loop kernels.

Pure-NumPy twins live in ``_kernels_py``.  Both evaluate identical formulas
in identical operation order; the build disables FMA contraction so results
agree bitwise with the NumPy fallback.
"""

import numpy as np

from libc.math cimport INFINITY

BACKEND_NAME = "compiled"


cdef inline double _sup_dist(const double *a, const double *b, Py_ssize_t n) noexcept nogil:
    cdef double m = 0.0
    cdef double d
    cdef Py_ssize_t i
    for i in range(n):
        d = a[i] - b[i]
        if d < 0.0:
            d = -d
        if d > m:
            m = d
    return m


cdef inline void _matvec(const double *g, const double *x, double *y, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc = acc + g[i * n + j] * x[j]
        y[i] = acc


cdef inline double _mcshane_one(
    const double *points,
    const double *values,
    double lip,
    double lo,
    double hi,
    const double *x,
    Py_ssize_t m,
    Py_ssize_t n,
) noexcept nogil:
    cdef double best = INFINITY
    cdef double t
    cdef Py_ssize_t i
    for i in range(m):
        t = values[i] + lip * _sup_dist(x, points + i * n, n)
        if t < best:
            best = t
    if best < lo:
        best = lo
    elif best > hi:
        best = hi
    return best


cdef inline double _set_dist_one(
    const double *points, const double *x, Py_ssize_t m, Py_ssize_t n
) noexcept nogil:
    cdef double best = INFINITY
    cdef double t
    cdef Py_ssize_t i
    for i in range(m):
        t = _sup_dist(x, points + i * n, n)
        if t < best:
            best = t
    return best


def set_distance_points(const double[:, ::1] points, const double[:, ::1] X):
    """For each row x of X, min over rows a of points of max_i |x_i - a_i|."""
    cdef Py_ssize_t q = X.shape[0]
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t n = points.shape[1]
    out_arr = np.empty(q)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t qi
    with nogil:
        for qi in range(q):
            out[qi] = _set_dist_one(&points[0, 0], &X[qi, 0], m, n)
    return out_arr


def mcshane_eval(
    const double[:, ::1] points,
    const double[::1] values,
    double lip,
    double lo,
    double hi,
    const double[:, ::1] X,
):
    """clip(min_i (values_i + lip * supdist(x, points_i)), lo, hi) per row of X."""
    cdef Py_ssize_t q = X.shape[0]
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t n = points.shape[1]
    out_arr = np.empty(q)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t qi
    with nogil:
        for qi in range(q):
            out[qi] = _mcshane_one(&points[0, 0], &values[0], lip, lo, hi, &X[qi, 0], m, n)
    return out_arr


def orbit_min_mcshane(
    const double[:, :, ::1] mats,
    const double[:, ::1] points,
    const double[::1] values,
    double lip,
    double lo,
    double hi,
    const double[:, ::1] X,
):
    """Minimum over net elements g of the McShane field at g @ x, per row of X.

    Returns (values, first-attaining net indices).
    """
    cdef Py_ssize_t q = X.shape[0]
    cdef Py_ssize_t k = mats.shape[0]
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t n = points.shape[1]
    out_arr = np.empty(q)
    idx_arr = np.empty(q, dtype=np.intp)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t[::1] idx = idx_arr
    scratch_arr = np.empty(n)
    cdef double[::1] y = scratch_arr
    cdef Py_ssize_t qi, ki
    cdef double best, val
    cdef Py_ssize_t best_k
    with nogil:
        for qi in range(q):
            best = INFINITY
            best_k = 0
            for ki in range(k):
                _matvec(&mats[ki, 0, 0], &X[qi, 0], &y[0], n)
                val = _mcshane_one(&points[0, 0], &values[0], lip, lo, hi, &y[0], m, n)
                if val < best:
                    best = val
                    best_k = ki
            out[qi] = best
            idx[qi] = best_k
    return out_arr, idx_arr


def orbit_min_points(
    const double[:, :, ::1] mats,
    const double[:, ::1] points,
    const double[:, ::1] X,
):
    """Minimum over net elements g of the sup distance from g @ x to points."""
    cdef Py_ssize_t q = X.shape[0]
    cdef Py_ssize_t k = mats.shape[0]
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t n = points.shape[1]
    out_arr = np.empty(q)
    idx_arr = np.empty(q, dtype=np.intp)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t[::1] idx = idx_arr
    scratch_arr = np.empty(n)
    cdef double[::1] y = scratch_arr
    cdef Py_ssize_t qi, ki
    cdef double best, val
    cdef Py_ssize_t best_k
    with nogil:
        for qi in range(q):
            best = INFINITY
            best_k = 0
            for ki in range(k):
                _matvec(&mats[ki, 0, 0], &X[qi, 0], &y[0], n)
                val = _set_dist_one(&points[0, 0], &y[0], m, n)
                if val < best:
                    best = val
                    best_k = ki
            out[qi] = best
            idx[qi] = best_k
    return out_arr, idx_arr
