"""Invariant continuous extension of labeled data on a locally closed domain.

The construction proceeds in three steps.  When the domain has no frontier
(it is already closed in R^n), the data is McShane-extended and the result
symmetrized.  Otherwise the domain is first straightened by the embedding

    x  ->  (x, 1 / D(x)),

where D is the group-invariant frontier gauge (the orbit minimum of the sup
distance to the frontier).  The gauge vanishes exactly on the saturated
frontier, so the last coordinate diverges there and the embedded domain is
closed in R^(n+1).  Because D is invariant, the embedding intertwines the
action on R^n with the trivially extended action g . (x, t) = (g x, t); the
data is extended and symmetrized upstairs and evaluated through the
embedding.

Input data must be invariant: every transformed sample must land on a sample
with the same value, within fixed tolerances.  That hypothesis cannot be
certified from samples alone, so it is validated against the net and
violations are reported with the worst offending orbit pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (
    CapabilityError,
    DimensionMismatch,
    FrontierProximityError,
    InvarianceViolation,
)
from .extension import LabeledSample, ScalarField, mcshane_extend
from .geometry import ClosedSet, as_point
from .groups import CompactGroup, FiniteGroup, ParameterizedGroup, sample_net
from .symmetrize import (
    SymmetrizedField,
    Witness,
    error_bound_batch,
    eval_with_witness,
    symmetrize,
)

# Sample points with gauge at or below this are frontier points at working precision.
GAUGE_FLOOR = 1e-30
# Tolerances for validating that the labeled data is invariant under the net.
ORBIT_MATCH_TOL = 1e-9
VALUE_MATCH_TOL = 1e-9


@dataclass(frozen=True)
class LocallyClosedDomain:
    """A domain X of R^n, described by its frontier (empty when X is closed).

    ``membership`` is an optional diagnostic predicate; evaluation points are
    assumed to lie in X and hence at positive distance from the frontier.
    """

    ambient_dim: int
    frontier: Optional[ClosedSet] = None
    membership: Optional[Callable[[np.ndarray], bool]] = None

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise ValueError("ambient_dim must be at least 1")
        if self.frontier is not None and self.frontier.ambient_dim != self.ambient_dim:
            raise DimensionMismatch("frontier dimension does not match the domain")


def invariant_frontier_gauge(
    frontier: Optional[ClosedSet], group: CompactGroup, eps: float
) -> SymmetrizedField:
    """Invariant distance-like gauge vanishing exactly on the saturated frontier."""
    if frontier is None:
        raise CapabilityError("the domain has no frontier; skip the embedding step")
    from .zeroset import invariant_zero_function

    return invariant_zero_function(frontier, group, eps)


def embed(x, gauge: ScalarField) -> np.ndarray:
    """The point (x, 1 / gauge(x)); defined only off the frontier."""
    x = as_point(x, gauge.domain_dim)
    g = gauge.eval(x)
    if g <= GAUGE_FLOOR:
        raise FrontierProximityError(
            f"point {x.tolist()} is on the frontier at working precision (gauge {g!r})"
        )
    return np.concatenate([x, [1.0 / g]])


def extend_action(group: CompactGroup) -> CompactGroup:
    """The same group acting on R^(n+1), fixing the extra coordinate."""
    if isinstance(group, FiniteGroup):
        k, n, _ = group.elements.shape
        ext = np.zeros((k, n + 1, n + 1))
        ext[:, :n, :n] = group.elements
        ext[:, n, n] = 1.0
        return FiniteGroup(list(ext))
    if isinstance(group, ParameterizedGroup):
        inner = group

        def chart(theta):
            g = np.asarray(inner.chart(theta), dtype=float)
            out = np.zeros((inner.dim + 1, inner.dim + 1))
            out[: inner.dim, : inner.dim] = g
            out[inner.dim, inner.dim] = 1.0
            return out

        def chart_batch(thetas):
            gs = inner.chart_stack(np.asarray(thetas, dtype=float))
            out = np.zeros((gs.shape[0], inner.dim + 1, inner.dim + 1))
            out[:, : inner.dim, : inner.dim] = gs
            out[:, inner.dim, inner.dim] = 1.0
            return out

        # The extra coordinate is fixed, so the same action bound holds:
        # the sup distance upstairs equals the sup distance downstairs.
        return ParameterizedGroup(
            dim=inner.dim + 1,
            param_lower=inner.param_lower,
            param_upper=inner.param_upper,
            chart=chart,
            action_lipschitz=inner.action_lipschitz,
            chart_batch=chart_batch,
        )
    raise TypeError(f"unsupported group type {type(group).__name__}")


class InvariantExtension:
    """A group-invariant continuous extension of labeled data.

    ``field`` is the symmetrized field, over R^n directly or over the
    embedded space R^(n+1); in the embedded case evaluation maps the query
    through the frontier gauge first.
    """

    def __init__(
        self,
        field: SymmetrizedField,
        embedded: bool,
        frontier_gauge: Optional[SymmetrizedField],
        data: LabeledSample,
        group: CompactGroup,
        domain: LocallyClosedDomain,
    ):
        self.field = field
        self.embedded = embedded
        self.frontier_gauge = frontier_gauge
        self.data = data
        self.group = group
        self.domain = domain

    @property
    def ambient_dim(self) -> int:
        return self.domain.ambient_dim

    def embed_point(self, x) -> np.ndarray:
        if not self.embedded:
            raise CapabilityError("this extension was built without the embedding step")
        return embed(x, self.frontier_gauge)

    def eval(self, x) -> float:
        x = as_point(x, self.ambient_dim)
        if self.embedded:
            return self.field.eval(self.embed_point(x))
        return self.field.eval(x)

    def __call__(self, x) -> float:
        return self.eval(x)

    def eval_batch(self, X: np.ndarray) -> np.ndarray:
        return self.eval_grid(X)[0]

    def witness(self, x) -> Witness:
        x = as_point(x, self.ambient_dim)
        q = self.embed_point(x) if self.embedded else x
        return eval_with_witness(self.field, q)

    def eval_grid(self, X: np.ndarray):
        """(values, witness indices, error bounds) over the rows of X.

        Rows on the frontier (gauge at working-precision zero) yield NaN
        values, witness index -1 and NaN bound instead of raising.
        """
        X = np.ascontiguousarray(X, dtype=float)
        if not self.embedded:
            vals, idx = self.field.minimize_batch(X)
            return vals, idx, error_bound_batch(self.field, X)
        gauge_vals = self.frontier_gauge.eval_batch(X)
        ok = gauge_vals > GAUGE_FLOOR
        vals = np.full(X.shape[0], np.nan)
        idx = np.full(X.shape[0], -1, dtype=np.int64)
        bounds = np.full(X.shape[0], np.nan)
        if np.any(ok):
            emb = np.concatenate([X[ok], 1.0 / gauge_vals[ok, None]], axis=1)
            v, j = self.field.minimize_batch(emb)
            vals[ok] = v
            idx[ok] = j
            bounds[ok] = error_bound_batch(self.field, emb)
        return vals, idx, bounds


def validate_invariant_data(data: LabeledSample, net_elements: np.ndarray) -> None:
    """Check that transformed samples land on samples with matching values.

    Raises InvarianceViolation describing the worst offending pair: either a
    transformed sample that matches no sample at all (the set of points is
    not closed under the group) or a matched sample whose value disagrees.
    """
    pts, vals = data.points, data.values
    m = pts.shape[0]
    worst_escape = (0.0, None)
    worst_value = (0.0, None)
    for gi, g in enumerate(net_elements):
        moved = pts @ g.T
        # nearest original sample for every transformed sample
        d = np.abs(moved[:, None, :] - pts[None, :, :]).max(axis=2)
        nearest = d.argmin(axis=1)
        ndist = d[np.arange(m), nearest]
        escaped = ndist > ORBIT_MATCH_TOL
        if np.any(escaped):
            i = int(np.argmax(np.where(escaped, ndist, -np.inf)))
            if ndist[i] > worst_escape[0]:
                worst_escape = (
                    float(ndist[i]),
                    {
                        "sample_index": i,
                        "group_index": gi,
                        "point": pts[i].tolist(),
                        "moved_point": moved[i].tolist(),
                        "nearest_distance": float(ndist[i]),
                    },
                )
        dv = np.abs(vals[nearest] - vals)
        mismatched = (~escaped) & (dv > VALUE_MATCH_TOL)
        if np.any(mismatched):
            i = int(np.argmax(np.where(mismatched, dv, -np.inf)))
            if dv[i] > worst_value[0]:
                j = int(nearest[i])
                worst_value = (
                    float(dv[i]),
                    {
                        "sample_index": i,
                        "matched_index": j,
                        "group_index": gi,
                        "point": pts[i].tolist(),
                        "matched_point": pts[j].tolist(),
                        "value": float(vals[i]),
                        "matched_value": float(vals[j]),
                    },
                )
    if worst_value[1] is not None:
        d = worst_value[1]
        raise InvarianceViolation(
            f"data is not invariant: samples {d['sample_index']} and {d['matched_index']} "
            f"lie in one orbit (element {d['group_index']}) but carry values "
            f"{d['value']} and {d['matched_value']}",
            kind="value-mismatch",
            detail=d,
        )
    if worst_escape[1] is not None:
        d = worst_escape[1]
        raise InvarianceViolation(
            f"sample set is not closed under the group: element {d['group_index']} moves "
            f"sample {d['sample_index']} at {d['point']} to {d['moved_point']}, "
            f"{d['nearest_distance']:.3e} away from every sample",
            kind="orbit-escape",
            detail=d,
        )


def extend_invariant(
    domain: LocallyClosedDomain,
    data: LabeledSample,
    group: CompactGroup,
    eps: float,
    lipschitz: Optional[float] = None,
) -> InvariantExtension:
    """Build the invariant continuous extension of ``data`` over ``domain``."""
    if data.dim != domain.ambient_dim:
        raise DimensionMismatch("data dimension does not match the domain")
    if group.dim != domain.ambient_dim:
        raise DimensionMismatch("group dimension does not match the domain")
    net = sample_net(group, eps)
    validate_invariant_data(data, net.elements)

    if domain.frontier is None:
        base = mcshane_extend(data, lipschitz)
        field = SymmetrizedField(base, group, net)
        return InvariantExtension(
            field=field,
            embedded=False,
            frontier_gauge=None,
            data=data,
            group=group,
            domain=domain,
        )

    gauge = invariant_frontier_gauge(domain.frontier, group, eps)
    embedded_pts = np.stack([embed(p, gauge) for p in data.points])
    embedded_data = LabeledSample(embedded_pts, data.values)
    # Distances only grow under the embedding, so any constant valid for the
    # original data still dominates the embedded data's empirical constant.
    base = mcshane_extend(embedded_data, lipschitz)
    lifted_group = extend_action(group)
    field = symmetrize(base, lifted_group, eps)
    return InvariantExtension(
        field=field,
        embedded=True,
        frontier_gauge=gauge,
        data=data,
        group=group,
        domain=domain,
    )
