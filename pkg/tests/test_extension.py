import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitext import LabeledSample, estimate_lipschitz, mcshane_extend


class TestLabeledSample:
    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            LabeledSample([[0.0], [1.0]], [1.0])

    def test_rejects_inconsistent_duplicates(self):
        with pytest.raises(ValueError, match="inconsistent"):
            LabeledSample([[0.0, 0.0], [1e-14, 0.0]], [0.0, 1.0])

    def test_accepts_consistent_duplicates(self):
        data = LabeledSample([[0.0], [1e-14]], [0.5, 0.5])
        assert len(data) == 2


class TestEstimateLipschitz:
    def test_line_example(self):
        data = LabeledSample([[0.0], [1.0], [2.0]], [0.0, 1.0, 1.0])
        assert estimate_lipschitz(data) == 1.0

    def test_single_point(self):
        assert estimate_lipschitz(LabeledSample([[3.0, 1.0]], [7.0])) == 0.0

    def test_constant_values(self):
        data = LabeledSample([[0.0], [2.0], [5.0]], [4.0, 4.0, 4.0])
        assert estimate_lipschitz(data) == 0.0


class TestMcShane:
    def test_midpoint_of_two_cones(self):
        F = mcshane_extend(LabeledSample([[0.0], [1.0]], [0.0, 1.0]), 1.0)
        assert F.eval([0.5]) == 0.5

    def test_clipping_to_range(self):
        F = mcshane_extend(LabeledSample([[0.0], [1.0]], [0.0, 1.0]), 1.0)
        # unclipped min(0 + 2, 1 + 1) = 2, clipped to the data maximum 1
        assert F.eval([2.0]) == 1.0

    def test_single_point_is_constant(self):
        F = mcshane_extend(LabeledSample([[2.0, -1.0]], [3.5]))
        rng = np.random.default_rng(0)
        for x in rng.uniform(-5, 5, size=(20, 2)):
            assert F.eval(x) == 3.5

    def test_rejects_undersized_constant(self):
        data = LabeledSample([[0.0], [1.0]], [0.0, 1.0])
        with pytest.raises(ValueError, match="below the empirical"):
            mcshane_extend(data, 0.5)

    def test_metadata(self):
        data = LabeledSample([[0.0], [1.0]], [-2.0, 1.0])
        F = mcshane_extend(data, 4.0)
        assert F.lipschitz == 4.0
        assert F.bounds == (-2.0, 1.0)

    def test_restriction_fidelity(self):
        rng = np.random.default_rng(42)
        for dim in (1, 2, 3):
            pts = rng.uniform(-3, 3, size=(30, dim))
            vals = rng.uniform(-2, 2, size=30)
            data = LabeledSample(pts, vals)
            F = mcshane_extend(data)
            assert np.max(np.abs(F.eval_batch(pts) - vals)) <= 1e-12

    def test_lipschitz_property(self):
        rng = np.random.default_rng(1)
        pts = rng.uniform(-2, 2, size=(25, 2))
        vals = rng.uniform(-1, 1, size=25)
        F = mcshane_extend(LabeledSample(pts, vals))
        X = rng.uniform(-4, 4, size=(10_000, 2))
        Y = rng.uniform(-4, 4, size=(10_000, 2))
        dv = np.abs(F.eval_batch(X) - F.eval_batch(Y))
        dx = np.abs(X - Y).max(axis=1)
        assert np.all(dv <= F.lipschitz * dx + 1e-9)

    def test_range_property(self):
        rng = np.random.default_rng(2)
        pts = rng.uniform(-2, 2, size=(25, 3))
        vals = rng.uniform(-1, 1, size=25)
        F = mcshane_extend(LabeledSample(pts, vals))
        X = rng.uniform(-6, 6, size=(2000, 3))
        out = F.eval_batch(X)
        assert np.all(out >= vals.min()) and np.all(out <= vals.max())

    def test_monotone_in_constant_before_clipping(self):
        rng = np.random.default_rng(3)
        pts = rng.uniform(-2, 2, size=(15, 2))
        vals = rng.uniform(-1, 1, size=15)
        data = LabeledSample(pts, vals)
        L = estimate_lipschitz(data)
        X = rng.uniform(-4, 4, size=(200, 2))
        for scale in (1.5, 3.0):
            lo = (vals[None, :] + L * np.abs(X[:, None, :] - pts[None, :, :]).max(axis=2)).min(1)
            hi_ = (
                vals[None, :] + scale * L * np.abs(X[:, None, :] - pts[None, :, :]).max(axis=2)
            ).min(1)
            assert np.all(hi_ >= lo - 1e-12)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.floats(min_value=-10, max_value=10, allow_nan=False),
            st.floats(min_value=-5, max_value=5, allow_nan=False),
        ),
        min_size=1,
        max_size=12,
        unique_by=lambda t: round(t[0], 6),
    )
)
def test_mcshane_reproduces_data_on_the_line(pairs):
    pts = np.array([[p] for p, _ in pairs])
    vals = np.array([v for _, v in pairs])
    F = mcshane_extend(LabeledSample(pts, vals))
    assert np.max(np.abs(F.eval_batch(pts) - vals)) <= 1e-9
