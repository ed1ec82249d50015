import math

import numpy as np
import pandas as pd
import pytest

from core.errors import ConfigurationError
from services.analysis_service import (
    bound_for,
    bound_ratios,
    fit_slope,
    lemma3_bound,
    lower_bound_floor,
    lower_bound_ratios,
    ml_is_ucb_regret_bound,
    mse_regret_bound,
    ratios_flat,
    record_breaking_sum,
    two_point_floor,
)


class TestFitSlope:
    def test_square_root(self):
        T = [2 ** k for k in range(6, 14)]
        fit = fit_slope(T, [3.0 * math.sqrt(t) for t in T])
        assert fit.slope == pytest.approx(0.5)
        assert fit.within(0.45, 0.55)
        assert fit.to_dict()["r_squared"] == pytest.approx(1.0)

    def test_two_thirds(self):
        T = [1000, 4000, 16_000, 64_000]
        fit = fit_slope(T, [t ** (2.0 / 3.0) for t in T])
        assert fit.slope == pytest.approx(2.0 / 3.0)

    def test_log_factors_inflate_the_slope(self):
        T = [2 ** k for k in range(10, 18)]
        fit = fit_slope(T, [math.sqrt(t) * math.log(t) ** 2 for t in T])
        assert fit.within(0.70, 0.74)

    def test_needs_four_horizons(self):
        with pytest.raises(ConfigurationError):
            fit_slope([100, 1000, 10_000], [1.0, 2.0, 3.0])

    def test_needs_two_octaves(self):
        with pytest.raises(ConfigurationError):
            fit_slope([100, 150, 200, 300], [1.0, 2.0, 3.0, 4.0])

    def test_names_the_non_positive_horizon(self):
        with pytest.raises(ConfigurationError, match="1000"):
            fit_slope([100, 1000, 10_000, 100_000], [1.0, 0.0, 3.0, 4.0])

    def test_length_mismatch(self):
        with pytest.raises(ConfigurationError):
            fit_slope([1, 2, 3, 4], [1.0])


class TestBounds:
    def test_mse_bound(self):
        T = 10_000
        expected = 2 + 4 * 3 * math.log(100 * 100 * T) * (1 + math.log(T)) * 100
        assert mse_regret_bound(T) == pytest.approx(expected)

    def test_ml_is_ucb_bound(self):
        T = 10_000
        expected = 4 + 18 * 100 + 80 * 3 * math.log(14 * 100 * T) * (1 + math.log(T)) * 14 * 100
        assert ml_is_ucb_regret_bound(T) == pytest.approx(expected)

    def test_two_point_floor(self):
        assert two_point_floor(10_000) == pytest.approx(100 / (24 * math.e ** 2))

    def test_bound_for(self):
        assert bound_for("etc", 100) is None
        assert bound_for("mse", 100, gamma=1.0) == pytest.approx(mse_regret_bound(100, gamma=1.0))

    def test_ratio_frames(self):
        frame = pd.DataFrame({"T": [100, 1000], "mean": [10.0, 20.0]})
        ratios = bound_ratios(frame, "mse")
        assert ratios["ratio"].iloc[0] == pytest.approx(10.0 / mse_regret_bound(100))
        lower = lower_bound_ratios(frame)
        assert lower["ratio"].iloc[1] == pytest.approx(20.0 / 100.0)
        assert "ratio" not in frame.columns
        assert "floor_ratio" not in lower.columns

    def test_lower_bound_floor(self):
        assert lower_bound_floor(1000, 10) == pytest.approx(100.0)
        assert lower_bound_floor(4, 16) == 4.0
        frame = pd.DataFrame({"T": [1000, 8000], "M": [10, 20], "mean": [50.0, 200.0]})
        lower = lower_bound_ratios(frame)
        assert lower["floor_ratio"].tolist() == pytest.approx([0.5, 0.5])

    def test_ratios_flat(self):
        assert ratios_flat([1.0, 1.5, 1.9])
        assert not ratios_flat([1.79, 2.33, 2.96, 3.80, 4.84])
        assert not ratios_flat([])


class TestRecordBreakingSum:
    def test_example(self):
        assert record_breaking_sum([5, 1, 2, 3]) == pytest.approx(1 + 1 / 2 + 1 / 3)

    def test_first_entry_is_ignored(self):
        assert record_breaking_sum([0.0, 0.9, 0.1]) == pytest.approx(2.0)
        assert record_breaking_sum([0.3]) == 0.0

    def test_ties_count_as_at_or_below(self):
        assert record_breaking_sum([0, 1, 1, 1]) == pytest.approx(1 + 1 / 2 + 1 / 3)

    def test_mean_below_bound(self, family):
        rng = np.random.default_rng(0)
        T = 100
        sums = [record_breaking_sum(family.sample(rng, T)) for _ in range(100)]
        assert lemma3_bound(T) == pytest.approx(31.4, abs=0.05)
        assert np.mean(sums) <= lemma3_bound(T)

    def test_decreasing_sequence_counts_every_round(self):
        # the bound holds in expectation only; a decreasing sequence never sees an earlier value below it
        assert record_breaking_sum(np.arange(50, 0, -1)) == 49
