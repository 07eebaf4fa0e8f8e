"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    """Operands live in different ambient dimensions."""


class GroupValidationError(ValueError):
    """A proposed group fails the identity, closure, inverse or regularity checks."""


class CapabilityError(ValueError):
    """The operation needs metadata or inputs the given objects do not carry."""


class FrontierProximityError(ValueError):
    """A point is too close to the frontier to be embedded at working precision."""


class InvarianceViolation(ValueError):
    """Labeled data is not invariant under the supplied group.

    Attributes
    ----------
    kind : str
        "value-mismatch" if two samples in one orbit carry different values,
        "orbit-escape" if a transformed sample has no matching sample at all.
    detail : dict
        The worst offending pair: sample indices, points, values, and the
        index of the group element that exposed the violation.
    """

    def __init__(self, message, kind, detail):
        super().__init__(message)
        self.kind = kind
        self.detail = detail


class RefinementCapReached(RuntimeError):
    """Refinement hit its halving cap before certifying the requested gap.

    Carries the best witness found so far in ``witness`` and the gap that was
    actually certified in ``certified_gap``.
    """

    def __init__(self, message, witness, certified_gap):
        super().__init__(message)
        self.witness = witness
        self.certified_gap = certified_gap
