"""Compact matrix groups, their linear actions on R^n, and net sampling.

Two group representations are supported.  A finite group is an explicit list
of invertible matrices validated for identity, closure and inverses.  A
parameterized group is a continuous chart from a compact parameter box to
matrices, together with a user-supplied action Lipschitz bound ``L_act``
satisfying

    sup_distance(g(t) x, g(t') x) <= L_act * |t - t'|_inf * (1 + |x|_inf)

for all parameters t, t' in the box.  Nets over parameterized groups are
dyadic grids, so halving the spacing yields a superset of the coarser net.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatch, GroupValidationError
from .geometry import as_point

# Tolerance for the identity/closure/inverse checks and the determinant floor.
GROUP_TOL = 1e-9
# Entrywise tolerance under which two net elements count as duplicates.
ELEMENT_DEDUP_TOL = 1e-12


def as_group_element(m, dim: Optional[int] = None) -> np.ndarray:
    """Coerce to a finite, square, invertible float64 matrix."""
    g = np.asarray(m, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise GroupValidationError(f"group elements must be square matrices, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise GroupValidationError("group element entries must be finite")
    if dim is not None and g.shape[0] != dim:
        raise DimensionMismatch(f"group element acts on dimension {g.shape[0]}, expected {dim}")
    if abs(np.linalg.det(g)) < GROUP_TOL:
        raise GroupValidationError(f"group element is numerically singular (|det| < {GROUP_TOL})")
    return g


def act(g: np.ndarray, x) -> np.ndarray:
    """Apply the linear action: the matrix-vector product g @ x."""
    g = np.asarray(g, dtype=float)
    x = as_point(x)
    if g.shape[1] != x.shape[0]:
        raise DimensionMismatch(f"cannot apply a {g.shape} matrix to a point of dimension {x.shape[0]}")
    return g @ x


class CompactGroup:
    """Base class; concrete groups are FiniteGroup or ParameterizedGroup."""

    dim: int


class FiniteGroup(CompactGroup):
    """An explicit finite matrix group; construction runs the full validation."""

    def __init__(self, elements):
        mats = [as_group_element(e) for e in elements]
        if not mats:
            raise GroupValidationError("a finite group needs at least one element")
        n = mats[0].shape[0]
        for g in mats:
            if g.shape[0] != n:
                raise GroupValidationError("all elements must be matrices of the same size")
        stack = np.ascontiguousarray(np.stack(mats))
        _check_group_axioms(stack)
        stack.setflags(write=False)
        self.elements = stack
        self.dim = n
        self.order = stack.shape[0]

    def __repr__(self):
        return f"FiniteGroup(order={self.order}, dim={self.dim})"


def _match_element(stack: np.ndarray, candidate: np.ndarray) -> int:
    """Index of the element of ``stack`` within GROUP_TOL of ``candidate``, or -1."""
    diffs = np.abs(stack - candidate[None, :, :]).max(axis=(1, 2))
    j = int(np.argmin(diffs))
    return j if diffs[j] <= GROUP_TOL else -1


def _check_group_axioms(stack: np.ndarray) -> None:
    k, n, _ = stack.shape
    eye = np.eye(n)
    if _match_element(stack, eye) < 0:
        raise GroupValidationError("the identity matrix is missing from the element list")
    for i in range(k):
        for j in range(k):
            prod = stack[i] @ stack[j]
            if _match_element(stack, prod) < 0:
                raise GroupValidationError(
                    f"closure failure: the product of elements {i} and {j} "
                    "matches no listed element"
                )
    for i in range(k):
        inv = np.linalg.inv(stack[i])
        if _match_element(stack, inv) < 0:
            raise GroupValidationError(f"inverse failure: element {i} has no listed inverse")


def validate_finite_group(elements) -> FiniteGroup:
    """Validate identity, closure and inverses at tolerance GROUP_TOL."""
    return FiniteGroup(elements)


class ParameterizedGroup(CompactGroup):
    """A compact family of matrices given by a chart over a parameter box.

    ``chart`` maps a parameter vector to an (n, n) matrix; ``chart_batch``,
    when given, maps a (c, p) array of parameters to a (c, n, n) stack and
    must agree with ``chart`` bitwise.  ``action_lipschitz`` is the bound
    L_act described in the module docstring; construction spot-checks it on a
    deterministic probe set and rejects gross violations.
    """

    def __init__(
        self,
        dim: int,
        param_lower,
        param_upper,
        chart: Callable[[np.ndarray], np.ndarray],
        action_lipschitz: float,
        chart_batch: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ):
        lo = as_point(param_lower)
        hi = as_point(param_upper, lo.shape[0])
        if np.any(lo > hi):
            raise GroupValidationError("parameter box needs lower <= upper componentwise")
        L = float(action_lipschitz)
        if not (L >= 0 and np.isfinite(L)):
            raise GroupValidationError("action_lipschitz must be a finite nonnegative real")
        lo.setflags(write=False)
        hi.setflags(write=False)
        self.dim = int(dim)
        self.param_lower = lo
        self.param_upper = hi
        self.chart = chart
        self.chart_batch = chart_batch
        self.action_lipschitz = L
        self._spot_check()

    def chart_stack(self, params: np.ndarray) -> np.ndarray:
        """Evaluate the chart on a (c, p) array of parameters."""
        params = np.asarray(params, dtype=float)
        if self.chart_batch is not None:
            out = np.asarray(self.chart_batch(params), dtype=float)
        else:
            out = np.stack([np.asarray(self.chart(t), dtype=float) for t in params])
        if out.shape != (params.shape[0], self.dim, self.dim):
            raise GroupValidationError(
                f"chart produced matrices of shape {out.shape[1:]}, expected "
                f"({self.dim}, {self.dim})"
            )
        return out

    def _spot_check(self):
        # Continuity / Lipschitz certificate probes: nearby parameter pairs at
        # the box midpoint and corners against a few fixed probe points.
        mid = 0.5 * (self.param_lower + self.param_upper)
        span = self.param_upper - self.param_lower
        step = np.where(span > 0, span * 1e-3, 0.0)
        pairs = [(mid, mid + step), (self.param_lower, self.param_lower + step)]
        probes = [np.eye(self.dim)[i] for i in range(self.dim)]
        probes.append(np.full(self.dim, 0.7))
        for t0, t1 in pairs:
            g0 = as_group_element(self.chart(t0), self.dim)
            g1 = as_group_element(self.chart(t1), self.dim)
            dt = float(np.max(np.abs(t1 - t0)))
            for x in probes:
                moved = float(np.max(np.abs(g0 @ x - g1 @ x)))
                bound = self.action_lipschitz * dt * (1.0 + float(np.max(np.abs(x))))
                if moved > bound + GROUP_TOL:
                    raise GroupValidationError(
                        "chart violates the declared action Lipschitz bound: "
                        f"moved {moved:.3e} > bound {bound:.3e} near parameter {t0.tolist()}"
                    )

    def __repr__(self):
        return (
            f"ParameterizedGroup(dim={self.dim}, box={self.param_lower.tolist()}..."
            f"{self.param_upper.tolist()}, L_act={self.action_lipschitz})"
        )


@dataclass(frozen=True)
class ParamGrid:
    """The dyadic parameter lattice behind a net over a parameterized group.

    ``subdivisions[i]`` is the number of intervals along axis i (a power of
    two, or 1 for a degenerate axis), so the lattice has subdivisions[i] + 1
    points per non-degenerate axis.  ``net_index`` maps the flat lattice
    index (C order) to the index of the corresponding net element after
    deduplication.
    """

    lower: np.ndarray
    upper: np.ndarray
    subdivisions: np.ndarray
    net_index: np.ndarray

    def spacing(self) -> np.ndarray:
        span = self.upper - self.lower
        return np.where(span > 0, span / self.subdivisions, 0.0)

    def lattice_params(self) -> np.ndarray:
        axes = []
        h = self.spacing()
        for i in range(self.lower.shape[0]):
            if self.upper[i] > self.lower[i]:
                idx = np.arange(self.subdivisions[i] + 1, dtype=float)
                axes.append(self.lower[i] + idx * h[i])
            else:
                axes.append(np.array([self.lower[i]]))
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass(frozen=True)
class EpsNet:
    """A finite net of group elements with a certified covering radius.

    ``covering_radius`` is a parameter-space bound: every group element's
    action on a point x is within L_act * covering_radius * (1 + |x|_inf) of
    some net element's action.  Finite groups are their own net with radius
    zero.  ``params`` aligns with ``elements`` for parameterized groups.
    """

    elements: np.ndarray
    covering_radius: float
    params: Optional[np.ndarray] = None
    grid: Optional[ParamGrid] = field(default=None, repr=False)

    def __len__(self):
        return self.elements.shape[0]


def _dedup_stack(stack: np.ndarray, tol: float = ELEMENT_DEDUP_TOL):
    """Keep-first dedup of a (k, n, n) stack; returns (kept, index_map)."""
    k = stack.shape[0]
    keys = np.round(stack.reshape(k, -1) / tol).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(order.shape[0])
    index_map = rank[inverse.ravel()]
    return stack[first[order]], index_map


def sample_net(group: CompactGroup, eps: float) -> EpsNet:
    """Sample a net with parameter spacing at most ``eps``.

    Finite groups return all elements with covering radius zero.  For
    parameterized groups the chart is evaluated on a dyadic grid over the
    parameter box (axis subdivisions are powers of two), the identity is
    appended, and duplicates are dropped keeping first occurrences.  The
    dyadic choice makes nets nested: the eps/2 grid contains the eps grid.
    """
    eps = float(eps)
    if not (eps > 0):
        raise ValueError("net spacing eps must be positive")
    if isinstance(group, FiniteGroup):
        return EpsNet(elements=group.elements, covering_radius=0.0)
    if not isinstance(group, ParameterizedGroup):
        raise TypeError(f"unsupported group type {type(group).__name__}")

    span = group.param_upper - group.param_lower
    subs = np.ones(span.shape[0], dtype=np.int64)
    for i, s in enumerate(span):
        if s > 0:
            # Power-of-two subdivision count keeps nets nested under halving;
            # the +1 keeps at least ceil(span/eps)+1 grid points even after a
            # periodic chart collapses the two endpoint elements.
            subs[i] = 1 << max(1, math.ceil(math.log2(s / eps + 1.0)))
    grid_stub = ParamGrid(
        lower=group.param_lower,
        upper=group.param_upper,
        subdivisions=subs,
        net_index=np.empty(0, dtype=np.int64),
    )
    params = grid_stub.lattice_params()
    mats = group.chart_stack(params)
    full = np.concatenate([mats, np.eye(group.dim)[None, :, :]], axis=0)
    kept, index_map = _dedup_stack(full)
    kept = np.ascontiguousarray(kept)
    kept.setflags(write=False)
    grid = ParamGrid(
        lower=group.param_lower,
        upper=group.param_upper,
        subdivisions=subs,
        net_index=index_map[: params.shape[0]],
    )
    kept_params = np.full((kept.shape[0], params.shape[1]), np.nan)
    lat_map = index_map[: params.shape[0]]
    kept_params[lat_map[::-1]] = params[::-1]  # reversed so first occurrences win
    kept_params.setflags(write=False)
    return EpsNet(elements=kept, covering_radius=eps, params=kept_params, grid=grid)


def orbit(net: EpsNet, x) -> list:
    """[act(g, x) for g in net.elements], in net order."""
    x = as_point(x, net.elements.shape[1])
    return list(net.elements @ x)


def so2(interval=(0.0, 2.0 * math.pi)) -> ParameterizedGroup:
    """Plane rotations parameterized by angle over ``interval``.

    The action Lipschitz bound is sqrt(2): rotations move a point by at most
    |t - t'| per unit Euclidean norm, and the Euclidean norm is at most
    sqrt(2) times the sup norm in the plane.
    """

    def chart(theta):
        a = float(np.asarray(theta).reshape(()))
        c, s = math.cos(a), math.sin(a)
        return np.array([[c, -s], [s, c]])

    def chart_batch(thetas):
        a = np.asarray(thetas, dtype=float).reshape(-1)
        c, s = np.cos(a), np.sin(a)
        out = np.empty((a.shape[0], 2, 2))
        out[:, 0, 0] = c
        out[:, 0, 1] = -s
        out[:, 1, 0] = s
        out[:, 1, 1] = c
        return out

    lo, hi = float(interval[0]), float(interval[1])
    return ParameterizedGroup(
        dim=2,
        param_lower=[lo],
        param_upper=[hi],
        chart=chart,
        action_lipschitz=math.sqrt(2.0),
        chart_batch=chart_batch,
    )


# Named charts available to scenario files.
CHART_CATALOG = {"so2": so2}
