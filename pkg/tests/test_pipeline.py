import math

import numpy as np
import pytest

from orbitext import (
    CapabilityError,
    FiniteSample,
    FrontierProximityError,
    InvarianceViolation,
    LabeledSample,
    LocallyClosedDomain,
    act,
    embed,
    extend_action,
    extend_invariant,
    invariant_frontier_gauge,
    so2,
    validate_finite_group,
)

from conftest import c4_matrices


def brute_force_gauge(frontier_pts, x, spacing=1e-5):
    """Oracle: min over a dense rotation grid of the sup distance to the set."""
    thetas = np.arange(0.0, 2 * math.pi + spacing, spacing)
    c, s = np.cos(thetas), np.sin(thetas)
    moved = np.stack([c * x[0] - s * x[1], s * x[0] + c * x[1]], axis=1)
    d = np.abs(moved[:, None, :] - frontier_pts[None, :, :]).max(axis=2).min(axis=1)
    return float(d.min())


class TestFrontierGauge:
    def test_origin_under_rotations_matches_oracle(self):
        frontier = FiniteSample([[0.0, 0.0]])
        gauge = invariant_frontier_gauge(frontier, so2(), 1e-3)
        x = np.array([1.0, 1.0])
        oracle = brute_force_gauge(frontier.points, x)
        assert abs(oracle - math.hypot(1, 1) / math.sqrt(2)) <= 1e-9
        assert abs(gauge.eval(x) - 1.0) <= 1e-3

    def test_symmetric_pair_under_signs(self):
        frontier = FiniteSample([[1.0, 0.0], [-1.0, 0.0]])
        g = validate_finite_group([np.eye(2), -np.eye(2)])
        gauge = invariant_frontier_gauge(frontier, g, 0.1)
        assert gauge.eval([0.0, 0.0]) == 1.0

    def test_zero_on_the_frontier(self):
        frontier = FiniteSample([[1.0, 0.0], [-1.0, 0.0]])
        g = validate_finite_group([np.eye(2), -np.eye(2)])
        gauge = invariant_frontier_gauge(frontier, g, 0.1)
        assert gauge.eval([1.0, 0.0]) == 0.0

    def test_missing_frontier_is_a_capability_error(self):
        with pytest.raises(CapabilityError):
            invariant_frontier_gauge(None, so2(), 0.1)


class TestEmbed:
    def _unit_interval_gauge(self):
        frontier = FiniteSample([[0.0], [1.0]])
        g = validate_finite_group([np.eye(1)])
        return invariant_frontier_gauge(frontier, g, 0.1)

    def test_midpoint(self):
        gauge = self._unit_interval_gauge()
        assert np.array_equal(embed([0.5], gauge), [0.5, 2.0])

    def test_near_edge(self):
        gauge = self._unit_interval_gauge()
        assert np.array_equal(embed([0.1], gauge), [0.1, 10.0])

    def test_on_frontier_raises(self):
        gauge = self._unit_interval_gauge()
        with pytest.raises(FrontierProximityError):
            embed([0.0], gauge)


class TestExtendAction:
    def test_finite_lift_fixes_last_coordinate(self):
        g = validate_finite_group(c4_matrices())
        lifted = extend_action(g)
        assert lifted.dim == 3
        for m, ml in zip(g.elements, lifted.elements):
            assert np.array_equal(ml[:2, :2], m)
            assert np.array_equal(ml[2], [0.0, 0.0, 1.0])

    def test_parameterized_lift(self):
        lifted = extend_action(so2())
        m = lifted.chart([math.pi / 2])
        assert abs(m[0, 1] + 1.0) < 1e-12 and m[2, 2] == 1.0
        assert lifted.action_lipschitz == so2().action_lipschitz


class TestExtendInvariant:
    def test_constant_data_no_frontier(self):
        g = validate_finite_group(c4_matrices())
        pts = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        data = LabeledSample(pts, np.full(4, 3.0))
        ext = extend_invariant(LocallyClosedDomain(ambient_dim=2), data, g, 0.1)
        assert not ext.embedded
        rng = np.random.default_rng(0)
        for x in rng.uniform(-3, 3, size=(50, 2)):
            assert ext.eval(x) == 3.0

    def test_punctured_plane_orbit_data(self):
        g = validate_finite_group(c4_matrices())
        domain = LocallyClosedDomain(ambient_dim=2, frontier=FiniteSample([[0.0, 0.0]]))
        pts = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        data = LabeledSample(pts, np.ones(4))
        ext = extend_invariant(domain, data, g, 0.1)
        assert ext.embedded
        assert np.max(np.abs(ext.eval_batch(pts) - 1.0)) <= 1e-9
        rng = np.random.default_rng(1)
        annulus = rng.uniform(-2, 2, size=(400, 2))
        annulus = annulus[np.abs(annulus).max(axis=1) >= 0.5]
        vals = ext.eval_batch(annulus)
        assert np.all(np.isfinite(vals))
        for m in c4_matrices():
            moved = ext.eval_batch(annulus @ np.asarray(m).T)
            assert np.max(np.abs(moved - vals)) <= 1e-9

    def test_reflection_extension_is_even(self):
        g = validate_finite_group([np.eye(1), -np.eye(1)])
        data = LabeledSample([[-1.0], [1.0]], [5.0, 5.0])
        ext = extend_invariant(LocallyClosedDomain(ambient_dim=1), data, g, 0.1)
        assert ext.eval([1.0]) == 5.0 and ext.eval([-1.0]) == 5.0
        rng = np.random.default_rng(2)
        for x in rng.uniform(-3, 3, size=50):
            assert abs(ext.eval([x]) - ext.eval([-x])) <= 1e-9

    def test_non_invariant_values_raise(self):
        g = validate_finite_group([np.eye(1), -np.eye(1)])
        data = LabeledSample([[1.0], [-1.0]], [1.0, 2.0])
        with pytest.raises(InvarianceViolation) as exc:
            extend_invariant(LocallyClosedDomain(ambient_dim=1), data, g, 0.1)
        assert exc.value.kind == "value-mismatch"
        assert exc.value.detail["value"] != exc.value.detail["matched_value"]

    def test_orbit_escaping_sample_set_raises(self):
        g = validate_finite_group(c4_matrices())
        data = LabeledSample([[1.0, 0.0]], [1.0])  # orbit of (1,0) not sampled
        with pytest.raises(InvarianceViolation) as exc:
            extend_invariant(LocallyClosedDomain(ambient_dim=2), data, g, 0.1)
        assert exc.value.kind == "orbit-escape"

    def test_data_on_frontier_raises(self):
        g = validate_finite_group(c4_matrices())
        domain = LocallyClosedDomain(ambient_dim=2, frontier=FiniteSample([[0.0, 0.0]]))
        data = LabeledSample([[0.0, 0.0]], [1.0])
        with pytest.raises(FrontierProximityError):
            extend_invariant(domain, data, g, 0.1)

    def test_equivariance_of_embedding(self):
        g = validate_finite_group(c4_matrices())
        domain = LocallyClosedDomain(ambient_dim=2, frontier=FiniteSample([[0.0, 0.0]]))
        pts = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        ext = extend_invariant(domain, LabeledSample(pts, np.ones(4)), g, 0.1)
        lifted = extend_action(g)
        rng = np.random.default_rng(3)
        for x in rng.uniform(0.2, 2.0, size=(20, 2)):
            for m, ml in zip(g.elements, lifted.elements):
                lhs = ext.embed_point(act(m, x))
                rhs = act(ml, ext.embed_point(x))
                assert np.max(np.abs(lhs - rhs)) <= 1e-9

    def test_frontier_blowup_is_monotone(self):
        g = validate_finite_group(c4_matrices())
        domain = LocallyClosedDomain(ambient_dim=2, frontier=FiniteSample([[0.0, 0.0]]))
        pts = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        ext = extend_invariant(domain, LabeledSample(pts, np.ones(4)), g, 0.1)
        last = [ext.embed_point([2.0**-k, 0.0])[-1] for k in range(1, 21)]
        assert all(b > a for a, b in zip(last, last[1:]))
