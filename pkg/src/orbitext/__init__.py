"""orbitext: group-invariant continuous extensions over the reals.

Build a continuous extension of data given on a group-invariant closed set,
make it invariant by taking the minimum over a group orbit, and certify the
result with quantitative error bounds.  Groups are compact matrix groups,
either explicit finite lists or parameterized charts sampled to an eps-net.
"""

from ._backend import BACKEND
from .errors import (
    CapabilityError,
    DimensionMismatch,
    FrontierProximityError,
    GroupValidationError,
    InvarianceViolation,
    RefinementCapReached,
)
from .extension import (
    LabeledSample,
    McShaneField,
    ScalarField,
    SetDistanceField,
    estimate_lipschitz,
    mcshane_extend,
)
from .geometry import (
    Box,
    ClosedSet,
    FiniteSample,
    SupBall,
    UnionSet,
    as_point,
    as_points,
    set_distance,
    sup_distance,
)
from .groups import (
    CompactGroup,
    EpsNet,
    FiniteGroup,
    ParameterizedGroup,
    act,
    orbit,
    sample_net,
    so2,
    validate_finite_group,
)
from .pipeline import (
    InvariantExtension,
    LocallyClosedDomain,
    embed,
    extend_action,
    extend_invariant,
    invariant_frontier_gauge,
)
from .symmetrize import (
    SymmetrizedField,
    Witness,
    error_bound,
    error_bound_batch,
    eval_with_witness,
    refine,
    symmetrize,
)
from .zeroset import ZeroSetAudit, audit_zero_set, invariant_zero_function

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Box",
    "CapabilityError",
    "ClosedSet",
    "CompactGroup",
    "DimensionMismatch",
    "EpsNet",
    "FiniteGroup",
    "FiniteSample",
    "FrontierProximityError",
    "GroupValidationError",
    "InvarianceViolation",
    "InvariantExtension",
    "LabeledSample",
    "LocallyClosedDomain",
    "McShaneField",
    "ParameterizedGroup",
    "RefinementCapReached",
    "ScalarField",
    "SetDistanceField",
    "SupBall",
    "SymmetrizedField",
    "UnionSet",
    "Witness",
    "ZeroSetAudit",
    "act",
    "as_point",
    "as_points",
    "audit_zero_set",
    "embed",
    "error_bound",
    "error_bound_batch",
    "estimate_lipschitz",
    "eval_with_witness",
    "extend_action",
    "extend_invariant",
    "invariant_frontier_gauge",
    "invariant_zero_function",
    "mcshane_extend",
    "orbit",
    "refine",
    "sample_net",
    "set_distance",
    "so2",
    "sup_distance",
    "symmetrize",
    "validate_finite_group",
    "__version__",
]
