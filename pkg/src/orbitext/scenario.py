"""Scenario files: one YAML document describing a whole run.

A scenario names the ambient dimension, the group, the net spacing, the
domain (optionally with a frontier), either labeled data or a catalog base
field, an evaluation grid, the audits to run, and output file names.  The
schema is versioned; ``version: 1`` is required.  Validation failures raise
ScenarioError carrying the offending line of the file.

The full schema is documented in the project README.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Any, Callable, Dict, Optional

import numpy as np
import yaml

from .extension import LabeledSample, ScalarField
from .geometry import Box, ClosedSet, FiniteSample, SupBall, UnionSet, dedup_points
from .groups import CompactGroup, ParameterizedGroup, so2, validate_finite_group
from .pipeline import LocallyClosedDomain

SCHEMA_VERSION = 1


class ScenarioError(Exception):
    """A scenario file failed to parse or validate."""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message)
        self.line = line


class LocatedDict(dict):
    """A mapping that remembers the source line of each key."""

    lines: Dict[Any, int]
    line: int


class _LineLoader(yaml.SafeLoader):
    pass


def _construct_mapping(loader, node):
    loader.flatten_mapping(node)
    d = LocatedDict(loader.construct_pairs(node, deep=True))
    d.lines = {}
    d.line = node.start_mark.line + 1
    for key_node, _ in node.value:
        key = loader.construct_object(key_node, deep=True)
        d.lines[key] = key_node.start_mark.line + 1
    return d


_LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)


class _Section:
    """Validated access into a located mapping, with dotted-path messages."""

    def __init__(self, mapping, path: str, line: Optional[int]):
        if not isinstance(mapping, dict):
            raise ScenarioError(f"{path}: expected a mapping", line)
        self.mapping = mapping
        self.path = path
        self.line = line

    def line_of(self, key) -> Optional[int]:
        lines = getattr(self.mapping, "lines", {})
        return lines.get(key, self.line)

    def fail(self, message: str, key=None):
        where = self.path if key is None else f"{self.path}.{key}"
        raise ScenarioError(f"{where}: {message}", self.line_of(key) if key else self.line)

    def has(self, key) -> bool:
        return key in self.mapping

    def get(self, key, default=None):
        return self.mapping.get(key, default)

    def require(self, key):
        if key not in self.mapping:
            self.fail(f"missing required key '{key}'")
        return self.mapping[key]

    def section(self, key, required=True) -> Optional["_Section"]:
        if key not in self.mapping:
            if required:
                self.fail(f"missing required section '{key}'")
            return None
        value = self.mapping[key]
        return _Section(value, f"{self.path}.{key}", self.line_of(key))

    def number(self, key, default=None, minimum=None, positive=False) -> Optional[float]:
        if key not in self.mapping:
            if default is None:
                return None
            return default
        v = self.mapping[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail("expected a number", key)
        v = float(v)
        if not math.isfinite(v):
            self.fail("expected a finite number", key)
        if positive and not v > 0:
            self.fail("expected a positive number", key)
        if minimum is not None and v < minimum:
            self.fail(f"expected a number >= {minimum}", key)
        return v

    def integer(self, key, default=None, minimum=None) -> Optional[int]:
        if key not in self.mapping:
            return default
        v = self.mapping[key]
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail("expected an integer", key)
        if minimum is not None and v < minimum:
            self.fail(f"expected an integer >= {minimum}", key)
        return v

    def string(self, key, default=None) -> Optional[str]:
        if key not in self.mapping:
            return default
        v = self.mapping[key]
        if not isinstance(v, str):
            self.fail("expected a string", key)
        return v

    def vector(self, key, dim=None) -> np.ndarray:
        v = self.require(key)
        arr = self._as_array(key, v, depth=1)
        if dim is not None and arr.shape[0] != dim:
            self.fail(f"expected {dim} entries, got {arr.shape[0]}", key)
        return arr

    def matrix_list(self, key) -> list:
        v = self.require(key)
        if not isinstance(v, list) or not v:
            self.fail("expected a non-empty list of matrices", key)
        return [self._as_array(key, m, depth=2) for m in v]

    def point_list(self, key, dim=None) -> np.ndarray:
        v = self.require(key)
        if not isinstance(v, list) or not v:
            self.fail("expected a non-empty list of points", key)
        arr = self._as_array(key, v, depth=2)
        if dim is not None and arr.shape[1] != dim:
            self.fail(f"expected points of dimension {dim}, got {arr.shape[1]}", key)
        return arr

    def _as_array(self, key, value, depth: int) -> np.ndarray:
        try:
            arr = np.asarray(value, dtype=float)
        except (TypeError, ValueError):
            self.fail("expected numeric entries", key)
        if arr.ndim != depth or not np.all(np.isfinite(arr)):
            self.fail(f"expected a finite {depth}-dimensional numeric array", key)
        return arr


@dataclass
class AuditSpec:
    """Which audits to run and with what parameters."""

    invariance: Optional[dict] = None
    restriction: Optional[dict] = None
    oracle: Optional[dict] = None
    zeroset: Optional[dict] = None


@dataclass
class Scenario:
    path: str
    ambient_dim: int
    group: CompactGroup
    epsilon: float
    domain: LocallyClosedDomain
    data: Optional[LabeledSample]
    data_lipschitz: Optional[float]
    base_field: Optional[ScalarField]
    grid_lower: Optional[np.ndarray]
    grid_upper: Optional[np.ndarray]
    grid_counts: Optional[np.ndarray]
    audits: AuditSpec = dc_field(default_factory=AuditSpec)
    output_grid: str = "grid.csv"
    output_report: str = "report.txt"

    def grid_points(self) -> np.ndarray:
        if self.grid_lower is None:
            raise ScenarioError(f"{self.path}: this command needs a 'grid' section")
        axes = [
            np.linspace(lo, hi, int(c))
            for lo, hi, c in zip(self.grid_lower, self.grid_upper, self.grid_counts)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def _build_closed_set(sec: _Section, dim: int) -> ClosedSet:
    kind = sec.string("kind")
    if kind is None:
        sec.fail("missing required key 'kind'")
    if kind == "finite_sample":
        return FiniteSample(sec.point_list("points", dim))
    if kind == "box":
        return Box(sec.vector("lower", dim), sec.vector("upper", dim))
    if kind == "sup_ball":
        return SupBall(sec.vector("center", dim), sec.number("radius", positive=True) or 0.0)
    if kind == "union":
        members = sec.require("members")
        if not isinstance(members, list) or not members:
            sec.fail("expected a non-empty list of member sets", "members")
        built = [
            _build_closed_set(_Section(m, f"{sec.path}.members[{i}]", sec.line_of("members")), dim)
            for i, m in enumerate(members)
        ]
        return UnionSet(built)
    sec.fail(f"unknown set kind '{kind}' (expected finite_sample, box, sup_ball or union)", "kind")


def _build_group(sec: _Section, dim: int) -> CompactGroup:
    from .errors import GroupValidationError

    finite = sec.section("finite", required=False)
    param = sec.section("parameterized", required=False)
    if (finite is None) == (param is None):
        sec.fail("exactly one of 'finite' or 'parameterized' is required")
    if finite is not None:
        mats = finite.matrix_list("matrices")
        for i, m in enumerate(mats):
            if m.shape != (dim, dim):
                finite.fail(f"matrix {i} has shape {m.shape}, expected ({dim}, {dim})", "matrices")
        try:
            return validate_finite_group(mats)
        except GroupValidationError as exc:
            finite.fail(str(exc), "matrices")
    chart_name = param.string("chart")
    if chart_name != "so2":
        param.fail("unknown chart (the catalog currently provides: so2)", "chart")
    if dim != 2:
        param.fail("the so2 chart acts on dimension 2", "chart")
    interval = (0.0, 2.0 * math.pi)
    if param.has("interval"):
        iv = param.vector("interval", 2)
        if not iv[0] < iv[1]:
            param.fail("interval needs lower < upper", "interval")
        interval = (float(iv[0]), float(iv[1]))
    group = so2(interval)
    override = param.number("action_lipschitz", default=None, minimum=0.0)
    if override is not None:
        group = ParameterizedGroup(
            dim=2,
            param_lower=group.param_lower,
            param_upper=group.param_upper,
            chart=group.chart,
            action_lipschitz=override,
            chart_batch=group.chart_batch,
        )
    return group


def _build_base_field(sec: _Section, dim: int) -> ScalarField:
    form = sec.string("form")
    if form == "coordinate":
        i = sec.integer("index", default=0, minimum=0)
        if i >= dim:
            sec.fail(f"coordinate index {i} out of range for dimension {dim}", "index")
        return ScalarField(
            fn=lambda p, i=i: p[i],
            domain_dim=dim,
            lipschitz=1.0,
            batch_fn=lambda X, i=i: X[:, i].copy(),
        )
    if form == "linear":
        coeffs = sec.vector("coeffs", dim)
        return ScalarField(
            fn=lambda p, c=coeffs: float(c @ p),
            domain_dim=dim,
            lipschitz=float(np.abs(coeffs).sum()),
            batch_fn=lambda X, c=coeffs: X @ c,
        )
    if form == "constant":
        v = sec.number("value")
        if v is None:
            sec.fail("missing required key 'value'")
        return ScalarField(
            fn=lambda p, v=v: v,
            domain_dim=dim,
            lipschitz=0.0,
            bounds=(v, v),
            batch_fn=lambda X, v=v: np.full(X.shape[0], v),
        )
    sec.fail(f"unknown field form '{form}' (expected coordinate, linear or constant)", "form")


# Closed forms a scenario may compare the computed field against.
ORACLE_FORMS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "neg_l2_norm": lambda X: -np.sqrt((X**2).sum(axis=1)),
}


def _build_data(sec: _Section, dim: int):
    has_points = sec.has("points")
    has_set = sec.has("set")
    if has_points == has_set:
        sec.fail("exactly one of 'points'+'values' or 'set'+'value'+'resolution' is required")
    if has_points:
        pts = sec.point_list("points", dim)
        vals = sec.vector("values", pts.shape[0])
        try:
            data = LabeledSample(pts, vals)
        except ValueError as exc:
            sec.fail(str(exc), "values")
    else:
        set_sec = sec.section("set")
        closed = _build_closed_set(set_sec, dim)
        value = sec.number("value")
        if value is None:
            sec.fail("densified data needs a constant 'value'")
        resolution = sec.number("resolution", positive=True)
        if resolution is None:
            sec.fail("densified data needs a positive 'resolution'")
        pts = dedup_points(closed.densify(resolution))
        data = LabeledSample(pts, np.full(pts.shape[0], value))
    lip = sec.number("lipschitz", default=None, minimum=0.0)
    return data, lip


def _build_audits(sec: Optional[_Section], dim: int) -> AuditSpec:
    spec = AuditSpec()
    if sec is None:
        return spec
    inv = sec.section("invariance", required=False)
    if inv is not None:
        tol = inv.get("tolerance", "auto")
        if tol != "auto":
            tol = inv.number("tolerance", minimum=0.0)
        spec.invariance = {
            "samples": inv.integer("samples", default=100, minimum=1),
            "tolerance": tol,
            "seed": inv.integer("seed", default=0, minimum=0),
        }
    res = sec.section("restriction", required=False)
    if res is not None:
        spec.restriction = {"tolerance": res.number("tolerance", default=1e-9, minimum=0.0)}
    orc = sec.section("oracle", required=False)
    if orc is not None:
        form = orc.string("form")
        if form not in ORACLE_FORMS:
            orc.fail(
                f"unknown oracle form '{form}' (known: {', '.join(sorted(ORACLE_FORMS))})", "form"
            )
        spec.oracle = {
            "form": form,
            "tolerance": orc.number("tolerance", positive=True) or 1e-6,
        }
    zs = sec.section("zeroset", required=False)
    if zs is not None:
        zset = _build_closed_set(zs.section("set"), dim)
        on_samples = zs.point_list("on_samples", dim)
        off_raw = zs.require("off_samples")
        if not isinstance(off_raw, list) or not off_raw:
            zs.fail("expected a non-empty list of {point, clearance} entries", "off_samples")
        off = []
        for i, entry in enumerate(off_raw):
            es = _Section(entry, f"{zs.path}.off_samples[{i}]", zs.line_of("off_samples"))
            off.append((es.vector("point", dim), es.number("clearance", positive=True)))
        spec.zeroset = {"set": zset, "on_samples": on_samples, "off_samples": off}
    return spec


def load_scenario(path: str) -> Scenario:
    """Parse and validate a scenario file; raises ScenarioError on any problem."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.load(fh, Loader=_LineLoader)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from exc
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark else None
        raise ScenarioError(f"YAML parse error: {exc.problem}", line) from exc
    except yaml.YAMLError as exc:
        raise ScenarioError(f"YAML parse error: {exc}") from exc

    root = _Section(raw, "scenario", getattr(raw, "line", 1))
    version = root.integer("version")
    if version != SCHEMA_VERSION:
        root.fail(f"unsupported or missing version (expected {SCHEMA_VERSION})", "version")
    dim = root.integer("ambient_dim", minimum=1)
    if dim is None:
        root.fail("missing required key 'ambient_dim'")

    group = _build_group(root.section("group"), dim)
    epsilon = root.number("epsilon", positive=True)
    if epsilon is None:
        root.fail("missing required key 'epsilon'")

    frontier = None
    dom = root.section("domain", required=False)
    if dom is not None:
        fr = dom.section("frontier", required=False)
        if fr is not None:
            frontier = _build_closed_set(fr, dim)
    domain = LocallyClosedDomain(ambient_dim=dim, frontier=frontier)

    data = None
    data_lip = None
    base_field = None
    data_sec = root.section("data", required=False)
    field_sec = root.section("base_field", required=False)
    if data_sec is not None and field_sec is not None:
        root.fail("'data' and 'base_field' are mutually exclusive")
    if data_sec is not None:
        data, data_lip = _build_data(data_sec, dim)
    if field_sec is not None:
        base_field = _build_base_field(field_sec, dim)

    grid_lower = grid_upper = grid_counts = None
    grid = root.section("grid", required=False)
    if grid is not None:
        grid_lower = grid.vector("lower", dim)
        grid_upper = grid.vector("upper", dim)
        if np.any(grid_lower > grid_upper):
            grid.fail("grid needs lower <= upper componentwise", "upper")
        counts = grid.require("counts")
        if (
            not isinstance(counts, list)
            or len(counts) != dim
            or any(isinstance(c, bool) or not isinstance(c, int) or c < 2 for c in counts)
        ):
            grid.fail("counts must list one integer >= 2 per axis", "counts")
        grid_counts = np.asarray(counts, dtype=np.int64)

    audits = _build_audits(root.section("audits", required=False), dim)

    output_grid, output_report = "grid.csv", "report.txt"
    out = root.section("output", required=False)
    if out is not None:
        output_grid = out.string("grid", default=output_grid)
        output_report = out.string("report", default=output_report)

    return Scenario(
        path=str(path),
        ambient_dim=dim,
        group=group,
        epsilon=float(epsilon),
        domain=domain,
        data=data,
        data_lipschitz=data_lip,
        base_field=base_field,
        grid_lower=grid_lower,
        grid_upper=grid_upper,
        grid_counts=grid_counts,
        audits=audits,
        output_grid=output_grid,
        output_report=output_report,
    )
