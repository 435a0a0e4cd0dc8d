import numpy as np
import pytest

import oracles
from interpunct.dfa import (
    DoubleScaling,
    FluctuationCurve,
    NonPositiveFluctuationError,
    SeriesTooShortError,
    SingleScaling,
    compute_fluctuation,
    default_scales,
    dfa,
    fit_scaling,
    loglog_slope,
)


def power_law_curve(scales, hurst=0.7, amplitude=0.3):
    scales = np.asarray(scales, dtype=np.int64)
    values = amplitude * scales.astype(np.float64) ** hurst
    return FluctuationCurve(scales=scales, values=values, poly_order=2, n=10_000)


class TestDefaultScales:
    def test_range_and_monotonicity(self):
        scales = default_scales(10_000)
        assert scales[0] == 10
        assert scales[-1] == 2000
        assert np.all(np.diff(scales) > 0)
        assert 20 <= scales.size <= 30  # rounding collapses some low scales

    def test_explicit_bounds(self):
        scales = default_scales(10_000, s_min=16, s_max=128, num=12)
        assert scales[0] == 16 and scales[-1] == 128

    def test_too_short_series(self):
        with pytest.raises(SeriesTooShortError):
            default_scales(40)


class TestComputeFluctuation:
    def test_matches_naive_reference(self):
        rng = np.random.default_rng(42)
        series = rng.standard_normal(700)
        scales = [10, 17, 31, 56, 100, 140]
        for order in (1, 2, 3):
            got = compute_fluctuation(series, scales, poly_order=order)
            ref = oracles.dfa_fluctuation_naive(series, scales, order)
            np.testing.assert_allclose(got.values, ref, rtol=1e-8)

    def test_interval_series_accepted(self):
        from interpunct.corpus import IntervalSeries

        values = np.random.default_rng(0).integers(1, 20, 400)
        series = IntervalSeries(values)
        got = compute_fluctuation(series, [10, 20, 40, 80])
        ref = compute_fluctuation(values, [10, 20, 40, 80])
        assert np.array_equal(got.values, ref.values)

    def test_polynomial_trend_is_removed(self):
        # Increments whose profile is an exact quadratic leave nothing
        # behind after second-order detrending.
        profile = 0.5 * np.arange(1, 401, dtype=np.float64) ** 2
        increments = np.diff(np.concatenate([[0.0], profile]))
        curve = compute_fluctuation(increments, [10, 20, 40, 80], poly_order=2)
        assert curve.is_degenerate

    def test_scale_bounds_validated(self):
        series = np.random.default_rng(0).standard_normal(300)
        with pytest.raises(ValueError, match="cannot constrain"):
            compute_fluctuation(series, [3, 10], poly_order=2)
        with pytest.raises(SeriesTooShortError):
            compute_fluctuation(series, [10, 100])  # 100 > 300 // 5

    def test_deterministic(self):
        series = np.random.default_rng(5).standard_normal(2_000)
        a = compute_fluctuation(series)
        b = compute_fluctuation(series)
        assert np.array_equal(a.values, b.values)


class TestLoglogSlope:
    def test_exact_power_law_recovered(self):
        curve = power_law_curve([10, 20, 40, 80, 160, 320], hurst=0.63, amplitude=0.8)
        fit = loglog_slope(curve)
        assert fit.hurst == pytest.approx(0.63, abs=1e-12)
        assert fit.log_amplitude == pytest.approx(np.log(0.8), abs=1e-12)
        assert fit.rmse == pytest.approx(0.0, abs=1e-12)

    def test_zero_fluctuation_rejected(self):
        curve = FluctuationCurve(
            scales=np.array([10, 20]), values=np.array([0.0, 1.0]), poly_order=2, n=1000
        )
        with pytest.raises(NonPositiveFluctuationError):
            loglog_slope(curve)


def piecewise_curve(h1=0.6, h2=0.8, break_scale=100.0, n_points=29):
    # 29 log-spaced points from 10 to 1000 place the 15th exactly on 100.
    scales = np.unique(np.rint(np.geomspace(10, 1000, n_points)).astype(np.int64))
    values = np.where(
        scales <= break_scale,
        scales.astype(np.float64) ** h1,
        break_scale ** (h1 - h2) * scales.astype(np.float64) ** h2,
    )
    return FluctuationCurve(scales=scales, values=values, poly_order=2, n=10_000)


class TestFitScaling:
    def test_exact_single_regime_stays_single(self):
        fit = fit_scaling(power_law_curve(default_scales(10_000)))
        assert isinstance(fit, SingleScaling)

    def test_exact_kink_detected(self):
        curve = piecewise_curve()
        fit = fit_scaling(curve)
        assert isinstance(fit, DoubleScaling)
        assert fit.hurst_small == pytest.approx(0.6, abs=1e-9)
        assert fit.hurst_large == pytest.approx(0.8, abs=1e-9)
        assert fit.crossover_scale == 100.0
        assert fit.rmse == pytest.approx(0.0, abs=1e-9)

    def test_small_slope_gap_stays_single(self):
        fit = fit_scaling(piecewise_curve(h1=0.6, h2=0.7))
        assert isinstance(fit, SingleScaling)

    def test_kink_too_close_to_edge_stays_single(self):
        # Fewer than five scales on the short side leaves no knee to try.
        curve = piecewise_curve(break_scale=900.0)
        fit = fit_scaling(curve)
        assert isinstance(fit, SingleScaling)

    def test_needs_enough_scales(self):
        with pytest.raises(ValueError, match="at least"):
            fit_scaling(power_law_curve([10, 20, 40, 80]))


class TestDfaEndToEnd:
    def test_white_noise_is_uncorrelated_single(self):
        series = np.random.default_rng(13).standard_normal(10_000)
        result = dfa(series)
        assert isinstance(result.scaling, SingleScaling)
        assert result.scaling.hurst == pytest.approx(0.5, abs=0.08)

    def test_persistent_surrogate_scales_higher(self):
        series = oracles.fourier_surrogate(0.8, 10_000, seed=3)
        result = dfa(series)
        hurst = (
            result.scaling.hurst
            if isinstance(result.scaling, SingleScaling)
            else result.scaling.hurst_large
        )
        assert hurst > 0.65

    def test_constant_series_rejected(self):
        with pytest.raises(NonPositiveFluctuationError):
            dfa(np.full(2_000, 3.0), poly_order=1)

    def test_record_shape(self):
        series = np.random.default_rng(0).standard_normal(4_000)
        rec = dfa(series).to_record()
        assert rec["poly_order"] == 2
        assert rec["n"] == 4_000
        assert rec["regime"] in {"single", "double"}

    def test_scaling_options_forwarded(self):
        curve = piecewise_curve()
        strict = fit_scaling(curve, min_gap=0.5)
        assert isinstance(strict, SingleScaling)
        loose = fit_scaling(curve, improvement=0.0, min_gap=0.01)
        assert isinstance(loose, DoubleScaling)
