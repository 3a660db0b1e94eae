import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lorsolve import (
    Domain,
    GridError,
    SampledFn,
    distribution,
    pointwise_norm,
    rearrangement,
)


class TestDomain:
    def test_unit_interval(self, unit):
        assert unit.k == 1
        assert unit.total_measure == 1.0
        assert list(unit.intervals()) == [(0.0, 1.0)]

    def test_union_measure(self):
        d = Domain.from_intervals([(0.0, 0.25), (0.5, 1.0)])
        assert d.total_measure == 0.75

    def test_overlapping_intervals_rejected(self):
        with pytest.raises(GridError):
            Domain.from_intervals([(0.0, 0.6), (0.5, 1.0)])

    def test_contains_half_open(self, unit):
        hits = unit.contains(np.array([0.0, 0.5, 1.0, -0.1]))
        assert hits.tolist() == [True, True, False, False]

    def test_empty_interval_rejected(self):
        with pytest.raises(GridError):
            Domain.interval(1.0, 1.0)


class TestSampledFn:
    def test_cells_per_box(self):
        d = Domain.from_intervals([(0.0, 0.25), (0.5, 1.0)])
        f = SampledFn.zeros(d, 16)
        assert f.ncells == 32
        assert f.cell_measures.sum() == pytest.approx(0.75, rel=1e-15)

    def test_from_callable_midpoint_projection(self, unit):
        f = SampledFn.from_callable(unit, 4, lambda x: x)
        assert np.array_equal(f.values, np.array([1, 3, 5, 7]) / 8.0)

    def test_indicator_measure(self, unit):
        chi = SampledFn.indicator(unit, 64, [(0.0, 0.25)])
        assert chi.integral() == pytest.approx(0.25, rel=1e-15)

    def test_integral_linear_exact(self):
        # midpoint projection integrates affine functions exactly
        d = Domain.from_intervals([(0.0, 0.25), (0.5, 1.0)])
        g = SampledFn.from_callable(d, 16, lambda x: x)
        assert g.integral() == pytest.approx(0.40625, rel=1e-14)

    def test_eval_at_zero_outside(self, unit):
        f = SampledFn.constant(unit, 8, 3.0)
        vals = f.eval_at(np.array([0.5, 1.5, -1.0]))
        assert vals.tolist() == [3.0, 0.0, 0.0]

    def test_cell_index_half_open(self, unit):
        f = SampledFn.zeros(unit, 4)
        idx = f.cell_index_of(np.array([0.0, 0.25, 0.999, 1.0]))
        assert idx.tolist() == [0, 1, 3, -1]

    def test_arithmetic_and_clip(self, unit):
        f = SampledFn.from_callable(unit, 8, lambda x: x)
        g = (2.0 * f - f).clip_at(0.5)
        assert np.max(g.values) == 0.5
        assert np.allclose((f + f).values, 2 * f.values)

    def test_mixed_grid_arithmetic_rejected(self, unit):
        f = SampledFn.zeros(unit, 8)
        g = SampledFn.zeros(unit, 16)
        with pytest.raises(GridError):
            _ = f + g

    def test_integral_abs_over_subset(self, unit):
        f = SampledFn.from_callable(unit, 64, lambda x: -np.ones_like(x))
        sub = Domain.from_intervals([(0.25, 0.75)])
        assert f.integral_abs_over(sub) == pytest.approx(0.5, rel=1e-12)


class TestCsvRoundTrip:
    def test_float_exact(self, unit):
        f = SampledFn.from_callable(unit, 32, lambda x: np.sin(7 * x))
        g = SampledFn.from_csv(f.csv_text(), unit, 32)
        assert np.array_equal(f.values, g.values)

    def test_vector_exact(self, unit):
        vals = np.arange(24, dtype=float).reshape(8, 3) / 7.0
        f = SampledFn(unit, 8, vals)
        g = SampledFn.from_csv(f.csv_text(), unit, 8)
        assert np.array_equal(f.values, g.values)
        assert g.is_vector

    def test_complex_exact(self, unit):
        f = SampledFn(unit, 8, np.arange(8) * (0.5 + 0.25j))
        g = SampledFn.from_csv(f.csv_text(), unit, 8)
        assert np.array_equal(f.values, g.values)

    def test_no_numpy_reprs_in_output(self, unit):
        f = SampledFn.zeros(unit, 8)
        assert "np." not in f.csv_text()

    def test_wrong_grid_rejected(self, unit):
        f = SampledFn.zeros(unit, 8)
        with pytest.raises(GridError):
            SampledFn.from_csv(f.csv_text(), unit, 16)


class TestDistribution:
    def test_scaled_indicator(self, unit, tau2):
        f = 2.0 * SampledFn.indicator(unit, 64, [(0.0, 0.25)])
        mu = distribution(f)
        assert mu.thresholds.tolist() == [0.0, 2.0]
        assert mu.measures.tolist() == [0.25]
        # integral of tau_inv(mu(s)) ds = tau_inv(1/4) * 2
        want = tau2.inverse(0.25) * 2.0
        assert mu.lorentz_integral(tau2.inverse) == pytest.approx(want, rel=1e-15)

    def test_right_continuity_convention(self, unit):
        f = SampledFn.indicator(unit, 4, [(0.0, 0.5)])
        mu = distribution(f)
        # mu(s) = measure{|f| > s}: 1/2 on [0,1), then 0
        assert mu(0.0) == 0.5
        assert mu(0.99) == 0.5
        assert mu(1.0) == 0.0

    def test_uses_magnitudes(self, unit):
        f = SampledFn.from_callable(unit, 16, lambda x: np.where(x < 0.5, -1.0, 1.0))
        mu = distribution(f)
        assert mu.thresholds.tolist() == [0.0, 1.0]
        assert mu.measures.tolist() == [1.0]


class TestRearrangement:
    def test_equimeasurable_bitwise(self, unit):
        rng = np.random.default_rng(5)
        f = SampledFn(unit, 128, rng.normal(size=128))
        fs = rearrangement(f)
        assert distribution(f).equals(fs.distribution())

    def test_nonincreasing_with_zero_plateau(self, unit):
        f = SampledFn.indicator(unit, 8, [(0.25, 0.5)])
        fs = rearrangement(f)
        assert np.all(np.diff(fs.values) <= 0)
        assert fs.edges[-1] == pytest.approx(1.0, rel=1e-15)
        assert fs.values[-1] == 0.0

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31 - 1))
    def test_preserves_l1_mass(self, seed):
        unit = Domain.unit_interval()
        rng = np.random.default_rng(seed)
        f = SampledFn(unit, 64, rng.normal(size=64) * 3.0)
        fs = rearrangement(f)
        mass = float(np.sum(fs.values * np.diff(fs.edges)))
        assert mass == pytest.approx(f.abs().integral(), rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31 - 1),
           st.floats(min_value=-8.0, max_value=8.0))
    def test_scaling_property(self, seed, c):
        unit = Domain.unit_interval()
        rng = np.random.default_rng(seed)
        f = SampledFn(unit, 32, rng.normal(size=32))
        left = rearrangement(c * f)
        right = rearrangement(f)
        assert np.allclose(left.values, abs(c) * right.values,
                           rtol=1e-12, atol=1e-300)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31 - 1))
    def test_hardy_littlewood_inequality(self, seed):
        # integral |f g| <= integral f* g* over (0, mu(domain))
        unit = Domain.unit_interval()
        rng = np.random.default_rng(seed)
        f = SampledFn(unit, 64, rng.normal(size=64))
        g = SampledFn(unit, 64, rng.normal(size=64))
        lhs = float(np.sum(np.abs(f.values * g.values) * f.cell_measures))
        fs, gs = rearrangement(f), rearrangement(g)
        grid = np.union1d(fs.edges, gs.edges)
        mids = 0.5 * (grid[:-1] + grid[1:])
        rhs = float(np.sum(fs(mids) * gs(mids) * np.diff(grid)))
        assert lhs <= rhs * (1 + 1e-12) + 1e-12


class TestPointwiseNorm:
    def test_three_four_five(self, unit):
        vals = np.tile([3.0, 4.0], (8, 1))
        f = SampledFn(unit, 8, vals)
        assert np.allclose(pointwise_norm(f).values, 5.0, rtol=1e-15)

    def test_component_embedding_is_exact(self, unit):
        # (h, 0, 0) must reduce to exactly |h|, bit for bit
        rng = np.random.default_rng(11)
        h = rng.normal(size=16) * 1.7
        vals = np.zeros((16, 3))
        vals[:, 0] = h
        f = SampledFn(unit, 16, vals)
        assert np.array_equal(pointwise_norm(f).values, np.abs(h))

    def test_complex_magnitude(self, unit):
        f = SampledFn(unit, 8, np.full(8, 3.0 + 4.0j))
        assert np.allclose(pointwise_norm(f).values, 5.0, rtol=1e-15)

    def test_scalar_passthrough(self, unit):
        f = SampledFn.from_callable(unit, 8, lambda x: x - 0.5)
        assert np.array_equal(pointwise_norm(f).values, np.abs(f.values))
