"""Invariant nonnegative functions vanishing exactly on a given closed set.

For a closed set A and a compact group G the field

    D(x) = min over net g of supdist(g x, A)

is nonnegative, invariant (exactly so for finite groups), and vanishes on
the orbit saturation of A, which is A itself whenever A is G-invariant.
``audit_zero_set`` turns that claim into a checkable report: D must be
negligible on declared members of A and bounded below on points declared to
be at a known clearance from the saturation.  The 0.4 factor on clearances
absorbs both the net gap and the difference between sup distance to the
saturation and the orbit minimum of the distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .extension import SetDistanceField
from .geometry import ClosedSet, as_point
from .groups import CompactGroup
from .symmetrize import SymmetrizedField, symmetrize

ON_SET_TOL = 1e-9
OFF_SET_FACTOR = 0.4


def invariant_zero_function(A: ClosedSet, group: CompactGroup, eps: float) -> SymmetrizedField:
    """The orbit minimum of the sup distance to A, as a symmetrized field."""
    if A is None:
        raise ValueError("a closed set is required")
    return symmetrize(SetDistanceField(A), group, eps)


@dataclass(frozen=True)
class ZeroSetAudit:
    """Outcome of auditing a candidate invariant zero function."""

    passed: bool
    on_results: Tuple[Tuple[tuple, float, bool], ...]
    off_results: Tuple[Tuple[tuple, float, float, bool], ...]

    def violators(self) -> List[str]:
        bad = []
        for point, value, ok in self.on_results:
            if not ok:
                bad.append(f"on-sample {list(point)}: D = {value!r} exceeds {ON_SET_TOL}")
        for point, value, clearance, ok in self.off_results:
            if not ok:
                bad.append(
                    f"off-sample {list(point)}: D = {value!r} is below "
                    f"{OFF_SET_FACTOR} * clearance {clearance!r}"
                )
        return bad

    def to_text(self) -> str:
        lines = [
            f"zero-set audit: {len(self.on_results)} on-samples, "
            f"{len(self.off_results)} off-samples"
        ]
        for point, value, ok in self.on_results:
            lines.append(
                f"  on  {list(point)} -> D = {value!r} "
                f"({'ok' if ok else 'VIOLATION'})"
            )
        for point, value, clearance, ok in self.off_results:
            lines.append(
                f"  off {list(point)} (clearance {clearance!r}) -> D = {value!r} "
                f"({'ok' if ok else 'VIOLATION'})"
            )
        lines.append(f"  verdict: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def audit_zero_set(
    D: SymmetrizedField,
    on_samples: Sequence,
    off_samples: Sequence[Tuple],
) -> ZeroSetAudit:
    """Check D against declared members and declared-clearance outsiders.

    ``off_samples`` holds (point, clearance) pairs where the clearance is the
    caller-stated sup distance from the point to the orbit saturation of the
    zero set.  Passing means D <= 1e-9 on every on-sample and
    D >= 0.4 * clearance on every off-sample.
    """
    on_results = []
    for p in on_samples:
        x = as_point(p, D.domain_dim)
        v = D.eval(x)
        on_results.append((tuple(x.tolist()), v, bool(v <= ON_SET_TOL)))
    off_results = []
    for p, clearance in off_samples:
        x = as_point(p, D.domain_dim)
        c = float(clearance)
        if not (c > 0):
            raise ValueError("off-sample clearances must be positive")
        v = D.eval(x)
        off_results.append((tuple(x.tolist()), v, c, bool(v >= OFF_SET_FACTOR * c)))
    passed = all(r[2] for r in on_results) and all(r[3] for r in off_results)
    return ZeroSetAudit(
        passed=passed,
        on_results=tuple(on_results),
        off_results=tuple(off_results),
    )
