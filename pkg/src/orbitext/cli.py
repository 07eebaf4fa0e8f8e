"""Command line front end driven by scenario files.

Subcommands:
  run <scenario>      build the field, write the evaluation grid CSV and the
                      audit report
  audit <scenario>    run the audits only
  zeroset <scenario>  build the invariant zero function for the audit set and
                      audit it

Exit codes: 0 all audits passed, 1 an audit failed or the data violates
invariance, 2 the scenario failed to parse or validate.  Numbers in the CSV
are written with repr, i.e. the shortest digit string that round-trips (at
most 17 significant digits), so identical scenarios produce byte-identical
output.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional

import numpy as np

from . import _backend
from .errors import FrontierProximityError, InvarianceViolation
from .groups import FiniteGroup
from .pipeline import InvariantExtension, extend_invariant
from .scenario import ORACLE_FORMS, Scenario, ScenarioError, load_scenario
from .symmetrize import SymmetrizedField, error_bound_batch, symmetrize
from .zeroset import audit_zero_set, invariant_zero_function


def _fmt(v) -> str:
    return repr(float(v))


class _Artifact:
    """Uniform view over the two run modes (data pipeline or direct field)."""

    def __init__(self, scenario: Scenario, extension=None, field=None):
        self.scenario = scenario
        self.extension: Optional[InvariantExtension] = extension
        self.field: Optional[SymmetrizedField] = field

    @property
    def net(self):
        return (self.extension.field if self.extension is not None else self.field).net

    def eval_grid(self, X):
        if self.extension is not None:
            return self.extension.eval_grid(X)
        vals, idx = self.field.minimize_batch(X)
        return vals, idx, error_bound_batch(self.field, X)

    def eval_batch(self, X):
        return self.eval_grid(X)[0]

    def bound_batch(self, X):
        return self.eval_grid(X)[2]


def _build_artifact(scenario: Scenario) -> _Artifact:
    if scenario.data is not None:
        ext = extend_invariant(
            scenario.domain,
            scenario.data,
            scenario.group,
            scenario.epsilon,
            scenario.data_lipschitz,
        )
        return _Artifact(scenario, extension=ext)
    if scenario.base_field is not None:
        field = symmetrize(scenario.base_field, scenario.group, scenario.epsilon)
        return _Artifact(scenario, field=field)
    raise ScenarioError(f"{scenario.path}: this command needs a 'data' or 'base_field' section")


def _write_grid_csv(path: str, X: np.ndarray, vals, idx, bounds) -> None:
    n = X.shape[1]
    header = ",".join([f"x{i + 1}" for i in range(n)] + ["phi_value", "witness_index", "error_bound"])
    lines = [header]
    for row, v, j, b in zip(X, vals, idx, bounds):
        coords = ",".join(_fmt(c) for c in row)
        lines.append(f"{coords},{_fmt(v)},{int(j)},{_fmt(b)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def check_invariance(artifact: _Artifact, samples: int, tolerance, seed: int):
    """Sample the grid box and bound max |F(g x) - F(x)| over net elements.

    ``tolerance`` is a number, or "auto" to use the certified per-pair bound
    (the sum of the two gap bounds; zero for finite groups).  Returns
    (passed, lines) for the report.
    """
    sc = artifact.scenario
    if sc.grid_lower is None:
        raise ScenarioError(f"{sc.path}: the invariance audit needs a 'grid' section")
    rng = np.random.default_rng(seed)
    X = rng.uniform(sc.grid_lower, sc.grid_upper, size=(samples, sc.ambient_dim))
    base_vals = artifact.eval_batch(X)
    auto = tolerance == "auto"
    base_bounds = artifact.bound_batch(X) if auto else None
    worst_dev = 0.0
    worst_margin = -np.inf
    passed = True
    skipped = 0
    for g in artifact.net.elements if artifact.extension is None else _ambient_net(artifact):
        moved = X @ g.T
        vals_g = artifact.eval_batch(moved)
        finite = np.isfinite(vals_g) & np.isfinite(base_vals)
        skipped += int(np.size(vals_g) - np.count_nonzero(finite))
        dev = np.abs(vals_g[finite] - base_vals[finite])
        if dev.size == 0:
            continue
        worst_dev = max(worst_dev, float(dev.max()))
        if auto:
            tol_pair = base_bounds[finite] + artifact.bound_batch(moved)[finite]
            margin = dev - tol_pair
            worst_margin = max(worst_margin, float(margin.max()))
            if np.any(margin > 0):
                passed = False
        else:
            if np.any(dev > tolerance):
                passed = False
    lines = [
        f"[invariance] samples={samples} seed={seed} "
        f"max deviation = {_fmt(worst_dev)}"
    ]
    if auto:
        lines.append(
            f"[invariance] tolerance = certified bound per pair, "
            f"worst margin = {_fmt(worst_margin) if np.isfinite(worst_margin) else 'n/a'}"
        )
    else:
        lines.append(f"[invariance] tolerance = {_fmt(tolerance)}")
    if skipped:
        lines.append(f"[invariance] skipped {skipped} frontier-degenerate evaluations")
    lines.append(f"[invariance] {'PASS' if passed else 'FAIL'}")
    return passed, lines


def _ambient_net(artifact: _Artifact) -> np.ndarray:
    # For embedded extensions the invariance check acts in the ambient space,
    # with the same group the scenario declared.
    from .groups import sample_net

    sc = artifact.scenario
    if isinstance(sc.group, FiniteGroup):
        return sc.group.elements
    return sample_net(sc.group, sc.epsilon).elements


def check_restriction(artifact: _Artifact, tolerance: float):
    """Verify the extension reproduces the labeled data."""
    sc = artifact.scenario
    if artifact.extension is None:
        raise ScenarioError(f"{sc.path}: the restriction audit needs a 'data' section")
    data = artifact.extension.data
    vals = artifact.eval_batch(data.points)
    dev = float(np.max(np.abs(vals - data.values)))
    passed = dev <= tolerance
    lines = [
        f"[restriction] {len(data)} samples, max |value - data| = {_fmt(dev)} "
        f"(tolerance {_fmt(tolerance)})",
        f"[restriction] {'PASS' if passed else 'FAIL'}",
    ]
    return passed, lines


def check_oracle(artifact: _Artifact, form: str, tolerance: float, X: np.ndarray, vals):
    oracle = ORACLE_FORMS[form](X)
    finite = np.isfinite(vals)
    dev = float(np.max(np.abs(vals[finite] - oracle[finite]))) if np.any(finite) else np.nan
    passed = bool(np.isfinite(dev) and dev <= tolerance)
    lines = [
        f"[oracle {form}] max |field - oracle| = {_fmt(dev)} (tolerance {_fmt(tolerance)})",
        f"[oracle {form}] {'PASS' if passed else 'FAIL'}",
    ]
    return passed, lines


def _run_zeroset_audit(scenario: Scenario, spec: dict):
    D = invariant_zero_function(spec["set"], scenario.group, scenario.epsilon)
    audit = audit_zero_set(D, spec["on_samples"], spec["off_samples"])
    lines = ["[zeroset] " + line for line in audit.to_text().splitlines()]
    return audit.passed, lines, D


def _report_header(scenario: Scenario, command: str) -> list:
    return [
        f"command: {command}",
        f"scenario: {os.path.basename(scenario.path)} (version 1)",
        f"backend: {_backend.BACKEND}",
        f"epsilon: {_fmt(scenario.epsilon)}",
    ]


def _write_report(path: str, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _cmd_run(scenario: Scenario, out_dir: str, seed: Optional[int], write_grid: bool) -> int:
    lines = _report_header(scenario, "run" if write_grid else "audit")
    try:
        artifact = _build_artifact(scenario)
    except InvarianceViolation as exc:
        lines.append(f"[build] FAIL: {exc}")
        lines.append("overall: FAIL")
        _write_report(os.path.join(out_dir, scenario.output_report), lines)
        print(f"invariance violation: {exc}", file=sys.stderr)
        return 1
    net = artifact.net
    lines.append(f"net: {len(net)} elements, covering radius {_fmt(net.covering_radius)}")

    grid_vals = None
    X = None
    if scenario.grid_lower is not None:
        X = scenario.grid_points()
        grid_vals, grid_idx, grid_bounds = artifact.eval_grid(X)
        if write_grid:
            _write_grid_csv(
                os.path.join(out_dir, scenario.output_grid), X, grid_vals, grid_idx, grid_bounds
            )
            lines.append(f"grid: {X.shape[0]} points -> {scenario.output_grid}")
            nan_rows = int(np.count_nonzero(~np.isfinite(grid_vals)))
            if nan_rows:
                lines.append(f"grid: {nan_rows} rows on the frontier written as nan")

    ok = True
    audits = scenario.audits
    if audits.restriction is not None:
        passed, out = check_restriction(artifact, audits.restriction["tolerance"])
        ok &= passed
        lines.extend(out)
    if audits.invariance is not None:
        passed, out = check_invariance(
            artifact,
            audits.invariance["samples"],
            audits.invariance["tolerance"],
            audits.invariance["seed"] if seed is None else seed,
        )
        ok &= passed
        lines.extend(out)
    if audits.oracle is not None:
        if X is None:
            raise ScenarioError(f"{scenario.path}: the oracle audit needs a 'grid' section")
        passed, out = check_oracle(
            artifact, audits.oracle["form"], audits.oracle["tolerance"], X, grid_vals
        )
        ok &= passed
        lines.extend(out)
    if audits.zeroset is not None:
        passed, out, _ = _run_zeroset_audit(scenario, audits.zeroset)
        ok &= passed
        lines.extend(out)

    lines.append(f"overall: {'PASS' if ok else 'FAIL'}")
    _write_report(os.path.join(out_dir, scenario.output_report), lines)
    return 0 if ok else 1


def _cmd_zeroset(scenario: Scenario, out_dir: str) -> int:
    if scenario.audits.zeroset is None:
        raise ScenarioError(f"{scenario.path}: the zeroset command needs an 'audits.zeroset' section")
    lines = _report_header(scenario, "zeroset")
    passed, out, D = _run_zeroset_audit(scenario, scenario.audits.zeroset)
    lines.append(f"net: {len(D.net)} elements, covering radius {_fmt(D.net.covering_radius)}")
    if scenario.grid_lower is not None:
        X = scenario.grid_points()
        vals, idx = D.minimize_batch(X)
        bounds = error_bound_batch(D, X)
        _write_grid_csv(os.path.join(out_dir, scenario.output_grid), X, vals, idx, bounds)
        lines.append(f"grid: {X.shape[0]} points -> {scenario.output_grid}")
    lines.extend(out)
    lines.append(f"overall: {'PASS' if passed else 'FAIL'}")
    _write_report(os.path.join(out_dir, scenario.output_report), lines)
    return 0 if passed else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="orbitext",
        description="Invariant continuous extensions driven by scenario files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("run", "evaluate the field on the grid and run the audits"),
        ("audit", "run the audits only"),
        ("zeroset", "build and audit the invariant zero function"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("scenario", help="path to the scenario YAML file")
        p.add_argument("--epsilon", type=float, default=None, help="override the net spacing")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument("--seed", type=int, default=None, help="override the audit sampling seed")

    args = parser.parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
        if args.epsilon is not None:
            if not args.epsilon > 0:
                raise ScenarioError("--epsilon must be positive")
            scenario.epsilon = float(args.epsilon)
        os.makedirs(args.out, exist_ok=True)
        if args.command == "zeroset":
            return _cmd_zeroset(scenario, args.out)
        return _cmd_run(scenario, args.out, args.seed, write_grid=args.command == "run")
    except ScenarioError as exc:
        where = f"{args.scenario}:{exc.line}" if exc.line is not None else args.scenario
        print(f"{where}: {exc}", file=sys.stderr)
        return 2
    except FrontierProximityError as exc:
        print(f"frontier proximity: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
