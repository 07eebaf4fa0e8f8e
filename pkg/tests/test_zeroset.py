import math

import numpy as np
import pytest

from orbitext import (
    FiniteSample,
    audit_zero_set,
    invariant_zero_function,
    so2,
    validate_finite_group,
)

from conftest import c4_matrices, d4_matrices


def sign_group():
    return validate_finite_group([np.eye(2), -np.eye(2)])


class TestInvariantZeroFunction:
    def test_symmetric_pair_equals_plain_distance(self):
        A = FiniteSample([[1.0, 0.0], [-1.0, 0.0]])
        D = invariant_zero_function(A, sign_group(), 0.1)
        assert D.eval([0.0, 0.0]) == 1.0

    def test_origin_under_rotations_matches_oracle(self):
        # closed form: |x|_2 / sqrt(2), cross-checked by a dense angle grid
        A = FiniteSample([[0.0, 0.0]])
        D = invariant_zero_function(A, so2(), 1e-3)
        thetas = np.arange(0.0, 2 * math.pi, 1e-5)
        x = np.array([1.0, 1.0])
        moved = np.stack(
            [np.cos(thetas) * x[0] - np.sin(thetas) * x[1],
             np.sin(thetas) * x[0] + np.cos(thetas) * x[1]],
            axis=1,
        )
        oracle = float(np.abs(moved).max(axis=1).min())
        assert abs(oracle - math.hypot(*x) / math.sqrt(2)) <= 1e-9
        assert abs(D.eval(x) - oracle) <= 1e-3

    def test_vanishes_on_invariant_set(self):
        A = FiniteSample([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        D = invariant_zero_function(A, validate_finite_group(c4_matrices()), 0.1)
        for p in A.points:
            assert D.eval(p) <= 1e-9

    def test_rejects_missing_set(self):
        with pytest.raises(ValueError):
            invariant_zero_function(None, sign_group(), 0.1)

    def test_nonnegative_everywhere(self):
        A = FiniteSample([[0.5, 0.25], [-0.5, -0.25]])
        D = invariant_zero_function(A, sign_group(), 0.1)
        rng = np.random.default_rng(0)
        assert np.all(D.eval_batch(rng.uniform(-3, 3, size=(500, 2))) >= 0.0)

    def test_lipschitz_via_operator_norm(self):
        A = FiniteSample([[1.0, 0.0], [0.0, -1.0]])
        D = invariant_zero_function(A, validate_finite_group(d4_matrices()), 0.1)
        rng = np.random.default_rng(1)
        X = rng.uniform(-3, 3, size=(400, 2))
        Y = rng.uniform(-3, 3, size=(400, 2))
        dv = np.abs(D.eval_batch(X) - D.eval_batch(Y))
        dx = np.abs(X - Y).max(axis=1)
        assert np.all(dv <= D.operator_norm * dx + 1e-9)

    def test_zero_exactly_on_orbit_saturation(self):
        # for a finite group and finite sample, brute-force enumeration of the
        # saturation decides membership exactly
        g = validate_finite_group(c4_matrices())
        A = FiniteSample([[1.0, 0.0]])
        D = invariant_zero_function(A, g, 0.1)
        saturation = np.stack([m @ A.points[0] for m in g.elements])
        rng = np.random.default_rng(2)
        X = np.vstack([saturation, rng.uniform(-2, 2, size=(100, 2))])
        vals = D.eval_batch(X)
        on = np.abs(X[:, None, :] - saturation[None, :, :]).max(axis=2).min(axis=1) == 0.0
        assert np.all(vals[on] == 0.0)
        assert np.all(vals[~on] > 0.0)


class TestAuditZeroSet:
    def test_symmetric_pair_audit_passes(self):
        A = FiniteSample([[1.0, 0.0], [-1.0, 0.0]])
        D = invariant_zero_function(A, sign_group(), 0.1)
        audit = audit_zero_set(D, on_samples=[[1.0, 0.0]], off_samples=[([0.0, 0.0], 1.0)])
        assert audit.passed and not audit.violators()

    def test_off_sample_on_the_set_fails_with_named_violator(self):
        A = FiniteSample([[1.0, 0.0], [-1.0, 0.0]])
        D = invariant_zero_function(A, sign_group(), 0.1)
        audit = audit_zero_set(D, on_samples=[], off_samples=[([1.0, 0.0], 0.5)])
        assert not audit.passed
        assert "off-sample [1.0, 0.0]" in audit.violators()[0]

    def test_so2_origin_audit_with_oracle_clearances(self):
        A = FiniteSample([[0.0, 0.0]])
        D = invariant_zero_function(A, so2(), 1e-3)
        offs = []
        for p in ([1.0, 1.0], [2.0, 0.0], [-0.5, 1.5]):
            clearance = math.hypot(*p) / math.sqrt(2)
            offs.append((p, clearance))
        audit = audit_zero_set(D, on_samples=[[0.0, 0.0]], off_samples=offs)
        assert audit.passed

    def test_report_text_mentions_verdict(self):
        A = FiniteSample([[1.0, 0.0], [-1.0, 0.0]])
        D = invariant_zero_function(A, sign_group(), 0.1)
        audit = audit_zero_set(D, on_samples=[[1.0, 0.0]], off_samples=[([0.0, 0.0], 1.0)])
        assert "verdict: PASS" in audit.to_text()
