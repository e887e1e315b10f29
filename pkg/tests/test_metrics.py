import math

import numpy as np
import pytest

from polarsim.core import Population
from polarsim.metrics import (
    aggregate_sweep_cell,
    fit_logistic,
    logistic,
    polarization_1d,
    polarization_trace,
)


class TestPolarization1d:
    def test_maximum_split(self):
        values = [0.0] * 50 + [1.0] * 50
        assert polarization_1d(values) == pytest.approx(0.25, abs=1e-12)

    def test_converged_population(self):
        # the paper's one-pass formula leaves ~1e-16 cancellation residue
        assert polarization_1d([0.37] * 40) == pytest.approx(0.0, abs=1e-12)

    def test_three_point_example(self):
        # sum(x^2)/3 - (sum(x)/3)^2 = 5/12 - 1/4 = 1/6
        assert polarization_1d([0.0, 0.5, 1.0]) == pytest.approx(1 / 6, abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            polarization_1d([])

    def test_bounded_by_quarter(self):
        rng = np.random.default_rng(201)
        for _ in range(2000):
            xs = rng.uniform(0, 1, rng.integers(1, 50))
            assert 0.0 <= polarization_1d(xs) <= 0.25 + 1e-12


class TestPolarizationTrace:
    def test_unit_square_corners(self):
        corners = np.array([[0, 0], [0, 1], [1, 0], [1, 1]] * 25, dtype=float)
        assert polarization_trace(corners) == pytest.approx(0.5, abs=1e-12)

    def test_coincident_actors(self):
        assert polarization_trace(np.full((30, 2), 0.42)) == pytest.approx(0.0, abs=1e-12)

    def test_reduces_to_1d_exactly(self):
        rng = np.random.default_rng(202)
        xs = rng.uniform(0, 1, 100)
        assert polarization_trace(xs.reshape(-1, 1)) == polarization_1d(xs)

    def test_equals_sum_of_per_dimension_variances(self):
        rng = np.random.default_rng(203)
        pos = rng.uniform(0, 1, (100, 3))
        per_dim = sum(polarization_1d(pos[:, d]) for d in range(3))
        assert polarization_trace(pos) == pytest.approx(per_dim, abs=1e-15)

    def test_accepts_population(self):
        pop = Population(np.full((10, 2), 0.5), np.full((10, 2), 0.5))
        assert polarization_trace(pop) == 0.0


class TestFitLogistic:
    GRID = np.round(np.arange(0.05, 1.0001, 0.05), 10)

    def test_exact_recovery_on_noiseless_samples(self):
        ys = logistic(self.GRID, a=0.25, k=-60.0, x0=0.284)
        fit = fit_logistic(self.GRID, ys)
        assert fit.converged
        assert fit.rmse < 1e-10
        assert fit.a == pytest.approx(0.25, abs=1e-6)
        assert fit.k == pytest.approx(-60.0, abs=1e-4)
        assert fit.x0 == pytest.approx(0.284, abs=1e-6)

    def test_recovery_under_noise(self):
        rng = np.random.default_rng(204)
        ys = logistic(self.GRID, 0.25, -60.0, 0.284) + rng.normal(0, 0.005, self.GRID.size)
        fit = fit_logistic(self.GRID, ys)
        assert fit.converged
        assert fit.x0 == pytest.approx(0.284, abs=0.005)
        assert fit.k == pytest.approx(-60.0, rel=0.15)

    def test_constant_data_flagged_unconverged(self):
        fit = fit_logistic(self.GRID, np.full(self.GRID.size, 0.1))
        assert not fit.converged
        assert abs(fit.k) < 1e-9

    def test_reorder_invariance_is_exact(self):
        rng = np.random.default_rng(205)
        ys = logistic(self.GRID, 0.2, 30.0, 0.4) + rng.normal(0, 0.01, self.GRID.size)
        fit_sorted = fit_logistic(self.GRID, ys)
        perm = rng.permutation(self.GRID.size)
        fit_shuffled = fit_logistic(self.GRID[perm], ys[perm])
        assert fit_sorted == fit_shuffled

    def test_mirroring_x_negates_k_and_x0(self):
        rng = np.random.default_rng(206)
        ys = logistic(self.GRID, 0.22, 25.0, 0.3) + rng.normal(0, 0.003, self.GRID.size)
        fwd = fit_logistic(self.GRID, ys)
        rev = fit_logistic(-self.GRID, ys)
        assert rev.a == pytest.approx(fwd.a, rel=1e-4)
        assert rev.k == pytest.approx(-fwd.k, rel=1e-3)
        assert rev.x0 == pytest.approx(-fwd.x0, rel=1e-3)

    def test_too_few_points_rejected(self):
        with pytest.raises(ValueError, match="4"):
            fit_logistic([0.1, 0.2, 0.3], [1, 2, 3])

    def test_duplicate_x_rejected(self):
        with pytest.raises(ValueError, match="distinct"):
            fit_logistic([0.1, 0.1, 0.3, 0.4], [1, 2, 3, 4])


def reference_cell_stats(values):
    """Trivial reference implementation for cross-checking aggregates."""
    data = sorted(float(v) for v in values)
    n = len(data)

    def quantile(p):  # linear interpolation, the type-7 convention
        h = (n - 1) * p
        lo = math.floor(h)
        hi = math.ceil(h)
        return data[lo] + (h - lo) * (data[hi] - data[lo])

    mean = sum(data) / n
    sd = math.sqrt(sum((x - mean) ** 2 for x in data) / n)
    q1, med, q3 = quantile(0.25), quantile(0.5), quantile(0.75)
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    whisker_lo = min(x for x in data if x >= lo_fence)
    whisker_hi = max(x for x in data if x <= hi_fence)
    return mean, sd, q1, med, q3, whisker_lo, whisker_hi


class TestAggregateSweepCell:
    def test_constant_cell(self):
        stats = aggregate_sweep_cell([0.25, 0.25, 0.25])
        assert stats.mean == 0.25
        assert stats.sd == 0.0

    def test_two_point_mean(self):
        assert aggregate_sweep_cell([0.0, 0.25]).mean == pytest.approx(0.125)

    def test_matches_reference_implementation(self):
        rng = np.random.default_rng(207)
        values = rng.uniform(0, 0.25, 20)
        stats = aggregate_sweep_cell(values)
        ref = reference_cell_stats(values)
        got = (stats.mean, stats.sd, stats.q1, stats.median, stats.q3,
               stats.whisker_lo, stats.whisker_hi)
        for a, b in zip(got, ref):
            assert a == pytest.approx(b, abs=1e-12)

    def test_whiskers_exclude_outliers(self):
        values = [0.10, 0.11, 0.12, 0.13, 0.14, 0.9]  # one far outlier
        stats = aggregate_sweep_cell(values)
        assert stats.whisker_hi < 0.9
        assert stats.whisker_lo == 0.10

    def test_quartiles_property(self):
        stats = aggregate_sweep_cell([0.1, 0.2, 0.3, 0.4])
        assert stats.quartiles == (stats.q1, stats.median, stats.q3)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            aggregate_sweep_cell([])
