"""Orbit-minimum symmetrization of a scalar field over a compact group.

Given a base field f and a group G acting linearly on R^n, the symmetrized
field is

    F(x) = min over g in an eps-net of G of f(g x),

which is exactly G-invariant for finite groups (the net is the whole group)
and invariant up to a certified gap for parameterized groups.  The gap is
quantified by ``error_bound``: with f L-Lipschitz and the action
L_act-Lipschitz in the parameter, the net minimum exceeds the true orbit
infimum by at most

    L * L_act * covering_radius * (1 + |x|_inf).

``refine`` shrinks that gap to a requested target by branch-and-bound on the
parameter box: it keeps every lattice cell whose value is within the
certified gap of the running minimum (only those can hide the true argmin),
halves the cells, and stops once the gap certificate meets the target.  The
sequence of returned values is non-increasing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import CapabilityError, DimensionMismatch, RefinementCapReached
from .extension import McShaneField, ScalarField, SetDistanceField
from .geometry import FiniteSample, as_point
from .groups import CompactGroup, EpsNet, FiniteGroup, ParameterizedGroup, sample_net

# Halving the cell radius more than this is pointless in double precision.
REFINE_MAX_HALVINGS = 60


@dataclass(frozen=True)
class Witness:
    """A group element attaining the orbit minimum at a query point."""

    value: float
    element: np.ndarray
    net_index: int


class SymmetrizedField(ScalarField):
    """The net minimum of a base field over a group orbit.

    Evaluation returns exactly the finite minimum over net elements, ties
    broken by the first net index.  The induced sup-norm operator norms of
    the net elements bound how much symmetrization can stretch the base
    Lipschitz constant, so the field advertises L * C_G when L is known.
    """

    def __init__(self, base: ScalarField, group: CompactGroup, net: EpsNet):
        if base.domain_dim != group.dim:
            raise DimensionMismatch(
                f"base field lives on R^{base.domain_dim} but the group acts on R^{group.dim}"
            )
        self.base = base
        self.group = group
        self.net = net
        # max induced sup-norm matrix norm (max absolute row sum) over the net
        self.operator_norm = float(np.abs(net.elements).sum(axis=2).max())
        lip = None if base.lipschitz is None else base.lipschitz * self.operator_norm
        super().__init__(
            fn=self._eval_one,
            domain_dim=group.dim,
            lipschitz=lip,
            bounds=base.bounds,
        )

    def _eval_one(self, x: np.ndarray) -> float:
        return self.minimize_batch(x[None, :])[0][0]

    def eval_batch(self, X: np.ndarray) -> np.ndarray:
        return self.minimize_batch(X)[0]

    def base_values(self, images: np.ndarray) -> np.ndarray:
        """Base-field values on an arbitrary (m, n) stack of image points."""
        base = self.base
        if isinstance(base, McShaneField):
            lo, hi = base.bounds
            return _backend.mcshane_eval(base.points, base.values, base.lipschitz, lo, hi, images)
        if isinstance(base, SetDistanceField) and isinstance(base.closed_set, FiniteSample):
            return _backend.set_distance_points(base.closed_set.points, images)
        return base.eval_batch(images)

    def minimize_batch(self, X: np.ndarray):
        """(values, net indices) of the orbit minimum for each row of X."""
        X = np.ascontiguousarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.domain_dim:
            raise DimensionMismatch(f"expected a (q, {self.domain_dim}) array, got {X.shape}")
        base = self.base
        mats = self.net.elements
        if isinstance(base, McShaneField):
            lo, hi = base.bounds
            return _backend.orbit_min_mcshane(
                mats, base.points, base.values, base.lipschitz, lo, hi, X
            )
        if isinstance(base, SetDistanceField) and isinstance(base.closed_set, FiniteSample):
            return _backend.orbit_min_points(mats, base.closed_set.points, X)
        return self._minimize_generic(X)

    def _minimize_generic(self, X: np.ndarray):
        k, n = self.net.elements.shape[0], self.domain_dim
        mats_t = self.net.elements.transpose(0, 2, 1)
        out = np.empty(X.shape[0])
        idx = np.empty(X.shape[0], dtype=np.int64)
        step = max(1, (1 << 22) // max(1, k * n))
        for s in range(0, X.shape[0], step):
            blk = X[s : s + step]
            images = np.matmul(blk, mats_t)  # (k, B, n)
            b = blk.shape[0]
            vals = self.base_values(images.reshape(k * b, n)).reshape(k, b)
            j = vals.argmin(axis=0)  # first index wins ties
            idx[s : s + step] = j
            out[s : s + step] = vals[j, np.arange(b)]
        return out, idx


def symmetrize(base: ScalarField, group: CompactGroup, eps: float) -> SymmetrizedField:
    """Build the symmetrized field over a fresh eps-net of ``group``."""
    return SymmetrizedField(base, group, sample_net(group, eps))


def eval_with_witness(field: SymmetrizedField, x) -> Witness:
    """The orbit minimum at x together with the first net element attaining it."""
    x = as_point(x, field.domain_dim)
    vals, idx = field.minimize_batch(x[None, :])
    j = int(idx[0])
    return Witness(value=float(vals[0]), element=field.net.elements[j], net_index=j)


def error_bound(field: SymmetrizedField, x) -> float:
    """Certified bound on (net minimum - true orbit infimum) at x.

    Zero for finite groups.  For parameterized groups the base field must
    carry a Lipschitz constant.
    """
    x = as_point(x, field.domain_dim)
    if isinstance(field.group, FiniteGroup):
        return 0.0
    if field.base.lipschitz is None:
        raise CapabilityError("error bound needs a base field with a Lipschitz constant")
    group = field.group
    return (
        field.base.lipschitz
        * group.action_lipschitz
        * field.net.covering_radius
        * (1.0 + float(np.max(np.abs(x))))
    )


def error_bound_batch(field: SymmetrizedField, X: np.ndarray) -> np.ndarray:
    """Vectorized ``error_bound`` over the rows of X."""
    X = np.asarray(X, dtype=float)
    if isinstance(field.group, FiniteGroup):
        return np.zeros(X.shape[0])
    if field.base.lipschitz is None:
        raise CapabilityError("error bound needs a base field with a Lipschitz constant")
    group = field.group
    scale = 1.0 + np.abs(X).max(axis=1)
    return field.base.lipschitz * group.action_lipschitz * field.net.covering_radius * scale


def refine(field: SymmetrizedField, x, target: float) -> Witness:
    """Shrink the certified gap at x below ``target`` by parameter bisection.

    For finite groups the net minimum is already exact and is returned
    unchanged.  Raises RefinementCapReached (carrying the best witness) if
    sixty halvings cannot certify the target.
    """
    x = as_point(x, field.domain_dim)
    target = float(target)
    if not (target > 0):
        raise ValueError("refinement target must be positive")
    if isinstance(field.group, FiniteGroup):
        return eval_with_witness(field, x)
    group = field.group
    if field.base.lipschitz is None:
        raise CapabilityError("refinement needs a base field with a Lipschitz constant")
    if field.net.grid is None:
        raise CapabilityError("refinement needs the net's parameter grid")

    witness = eval_with_witness(field, x)
    # The origin is fixed by every linear action, so its orbit is a single
    # point and the net minimum is already the infimum.
    if not np.any(x):
        return witness

    lip = field.base.lipschitz * group.action_lipschitz * (1.0 + float(np.max(np.abs(x))))
    grid = field.net.grid
    spacing = grid.spacing()
    radius = float(spacing.max()) / 2.0
    if lip == 0.0 or lip * radius <= target:
        return witness

    params = grid.lattice_params()
    values = _values_at_params(field, params, x)
    roots = grid.net_index.copy()
    best_val = witness.value
    best_param = None
    best_root = witness.net_index
    j = int(values.argmin())
    if values[j] < best_val:
        best_val = float(values[j])
        best_param = params[j]
        best_root = int(roots[j])

    offsets = _split_offsets(spacing > 0)
    halvings = 0
    while lip * radius > target:
        if halvings >= REFINE_MAX_HALVINGS:
            raise RefinementCapReached(
                f"certified gap {lip * radius:.3e} still exceeds target {target:.3e} "
                f"after {REFINE_MAX_HALVINGS} halvings",
                witness=_make_witness(field, group, best_param, best_root, best_val),
                certified_gap=lip * radius,
            )
        keep = values <= best_val + lip * radius
        params, roots = params[keep], roots[keep]
        # children sit at parent +- half the current radius per active axis
        step_vec = np.where(spacing > 0, radius / 2.0, 0.0)
        children = (params[:, None, :] + offsets[None, :, :] * step_vec[None, None, :]).reshape(
            -1, params.shape[1]
        )
        child_roots = np.repeat(roots, offsets.shape[0])
        if children.shape[0] > 4_000_000:
            raise RefinementCapReached(
                f"near-flat orbit values: the candidate band grew to {children.shape[0]} "
                f"cells before certifying target {target:.3e}",
                witness=_make_witness(field, group, best_param, best_root, best_val),
                certified_gap=lip * radius,
            )
        np.clip(children, grid.lower, grid.upper, out=children)
        children, child_roots = _dedup_params(children, child_roots)
        values = _values_at_params(field, children, x)
        params, roots = children, child_roots
        radius /= 2.0
        halvings += 1
        order = int(values.argmin())
        if values[order] < best_val:
            best_val = float(values[order])
            best_param = params[order]
            best_root = int(roots[order])
    return _make_witness(field, group, best_param, best_root, best_val)


def _split_offsets(active_axes: np.ndarray) -> np.ndarray:
    """Signed corner offsets (+-1 per active axis, 0 on degenerate axes)."""
    cols = []
    for active in active_axes:
        cols.append(np.array([-1.0, 1.0]) if active else np.array([0.0]))
    mesh = np.meshgrid(*cols, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _dedup_params(params: np.ndarray, roots: np.ndarray):
    """Keep-first dedup of exactly equal parameter rows (dyadic, so exact)."""
    _, first = np.unique(params, axis=0, return_index=True)
    keep = np.sort(first)
    return params[keep], roots[keep]


def _values_at_params(field: SymmetrizedField, params: np.ndarray, x: np.ndarray) -> np.ndarray:
    if params.shape[0] == 0:
        return np.empty(0)
    mats = field.group.chart_stack(params)
    images = mats @ x
    return field.base_values(np.ascontiguousarray(images))


def _make_witness(field, group, best_param, best_root, best_val) -> Witness:
    if best_param is None:
        return Witness(
            value=best_val, element=field.net.elements[best_root], net_index=best_root
        )
    element = np.asarray(group.chart(best_param), dtype=float)
    return Witness(value=best_val, element=element, net_index=int(best_root))
