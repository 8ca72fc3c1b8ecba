import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from focalrisk import (
    ThetaGrid,
    TrueModel,
    make_sample,
    squared_error_loss,
    tabulated_loss,
    truncated_normal_density,
)
from focalrisk.errors import DegenerateSupport, EmptySample, OutOfSupport
from focalrisk.quadrature import integrate


class TestMakeSample:
    def test_sorts(self):
        s = make_sample([0.8, 0.2], 0, 1)
        assert s.values.tolist() == [0.2, 0.8]

    def test_singleton(self):
        s = make_sample([0.5], 0, 1)
        assert s.values.tolist() == [0.5]
        assert s.n == 1

    def test_out_of_support(self):
        with pytest.raises(OutOfSupport):
            make_sample([1.2], 0, 1)

    def test_empty(self):
        with pytest.raises(EmptySample):
            make_sample([], 0, 1)

    def test_degenerate_support(self):
        with pytest.raises(DegenerateSupport):
            make_sample([0.5], 1, 1)

    @given(st.lists(st.floats(0, 1), min_size=1, max_size=40))
    def test_round_trip_original_order(self, raw):
        s = make_sample(raw, 0, 1)
        assert s.to_original().tolist() == raw

    def test_idempotent_on_sorted(self):
        raw = [0.1, 0.2, 0.3]
        s = make_sample(raw, 0, 1)
        assert s.values.tolist() == raw
        assert s.to_original().tolist() == raw


class TestTruncatedNormalDensity:
    def test_value_at_zero(self):
        # phi(0) / (Phi(3) - Phi(-3)), frozen from a 40-digit erf oracle
        assert truncated_normal_density(0, -3, 3) == pytest.approx(
            0.40002225892128481, abs=1e-12
        )

    def test_outside_support(self):
        assert truncated_normal_density(4, -3, 3) == 0.0

    @given(st.floats(0.01, 3))
    def test_symmetry(self, y):
        assert truncated_normal_density(-y, -3, 3) == pytest.approx(
            truncated_normal_density(y, -3, 3), rel=1e-12
        )

    def test_integrates_to_one(self):
        total = integrate(lambda y: truncated_normal_density(y, -3, 3), -3, 3, tol=1e-10)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_degenerate_support(self):
        with pytest.raises(DegenerateSupport):
            truncated_normal_density(0, 2, 2)


def test_squared_loss_convexity_consequence():
    # midpoint value never exceeds the larger endpoint value
    loss = squared_error_loss((-1, 1))
    rng = np.random.default_rng(7)
    for _ in range(1000):
        y = np.sort(rng.uniform(-3, 3, size=3))
        theta = rng.uniform(-1, 1)
        vals = loss(theta, y)
        assert vals[1] <= max(vals[0], vals[2]) + 1e-12


def test_tabulated_loss_interpolates():
    loss = tabulated_loss([0.0, 1.0], [0.0, 1.0], np.array([[0.0, 2.0], [4.0, 6.0]]))
    assert loss(0.0, 0.5) == pytest.approx(1.0)
    assert loss(0.5, 0.5) == pytest.approx(3.0)
    assert loss(1.0, 1.0) == pytest.approx(6.0)


class TestThetaGrid:
    def test_endpoints(self):
        g = ThetaGrid(-1, 1, 5)
        assert g.points[0] == -1 and g.points[-1] == 1
        assert np.all(np.diff(g.points) > 0)

    def test_bad_count(self):
        with pytest.raises(ValueError):
            ThetaGrid(0, 1, 0)


class TestTrueModel:
    def test_tabulated_normalization_enforced(self):
        with pytest.raises(ValueError):
            TrueModel.tabulated([0, 1], [1.0, 2.0])

    def test_tabulated_ok(self):
        m = TrueModel.tabulated([0, 1], [1.0, 1.0])
        assert m.density(0.5) == pytest.approx(1.0)
        assert m.density(2.0) == 0.0
