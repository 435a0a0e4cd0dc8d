import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from interpunct.weibull import (
    BETA_BOUNDS,
    P_BOUNDS,
    DegenerateSeriesError,
    WeibullParams,
    expected_value,
    ff_rmse,
    fit_mle,
    hazard,
    log_likelihood,
    log_pmf,
    pmf,
    sample,
    survival,
)

KS = np.arange(1, 101, dtype=np.float64)

# Inside this box nothing saturates on k <= 100: survival stays normal
# (|log_q| * 100^beta < 700) and the hazard stays clear of 1.0, so float
# comparisons below are meaningful everywhere.
GRID = [
    (float(p), float(b))
    for p in np.linspace(0.02, 0.35, 10)
    for b in np.linspace(0.15, 1.6, 10)
]

params_st = st.tuples(
    st.floats(min_value=0.01, max_value=0.9),
    st.floats(min_value=0.2, max_value=4.0),
).map(lambda t: WeibullParams(*t))


class TestParams:
    def test_p_outside_unit_interval_rejected(self):
        for bad in (0.0, 1.0, -0.2, 1.7, float("nan")):
            with pytest.raises(ValueError):
                WeibullParams(bad, 1.0)

    def test_beta_must_be_positive(self):
        for bad in (0.0, -1.0, float("nan")):
            with pytest.raises(ValueError):
                WeibullParams(0.3, bad)

    def test_log_q(self):
        assert WeibullParams(0.3, 1.0).log_q == math.log1p(-0.3)


class TestDistribution:
    def test_survival_at_zero_is_one(self):
        for p, b in GRID:
            assert survival(WeibullParams(p, b), 0) == 1.0

    def test_survival_matches_high_precision_reference(self):
        for p, b in GRID[::7]:
            params = WeibullParams(p, b)
            for k in (1, 2, 5, 17, 100):
                ref = oracles.survival_mp(p, b, k)
                assert survival(params, k) == pytest.approx(ref, rel=1e-13)

    def test_pmf_matches_high_precision_reference(self):
        for p, b in GRID[::7]:
            params = WeibullParams(p, b)
            for k in (1, 2, 5, 17, 100):
                ref = oracles.pmf_mp(p, b, k)
                assert pmf(params, k) == pytest.approx(ref, rel=1e-12)

    def test_pmf_is_survival_decrement(self):
        for p, b in GRID:
            params = WeibullParams(p, b)
            lhs = pmf(params, KS)
            rhs = survival(params, KS - 1.0) - survival(params, KS)
            np.testing.assert_allclose(lhs, rhs, atol=1e-15, rtol=1e-12)

    def test_pmf_sums_to_one_with_tail(self):
        for p, b in GRID[::11]:
            params = WeibullParams(p, b)
            k = np.arange(1, 2001, dtype=np.float64)
            total = float(np.sum(pmf(params, k))) + survival(params, 2000)
            assert total == pytest.approx(1.0, abs=1e-12)

    def test_hazard_identity_pmf_over_lagged_survival(self):
        worst = 0.0
        for p, b in GRID:
            params = WeibullParams(p, b)
            lhs = hazard(params, KS)
            rhs = pmf(params, KS) / survival(params, KS - 1.0)
            worst = max(worst, float(np.abs(lhs - rhs).max()))
        assert worst < 1e-12

    def test_hazard_matches_high_precision_reference(self):
        for p, b in GRID[::7]:
            params = WeibullParams(p, b)
            for k in (1, 3, 10, 50):
                ref = oracles.hazard_mp(p, b, k)
                assert hazard(params, k) == pytest.approx(ref, rel=1e-12)

    def test_hazard_at_one_equals_p_exactly(self):
        # k = 1 gives h = 1 - (1-p)^1 = p for every beta, not just 1.
        for p, b in GRID:
            assert hazard(WeibullParams(p, b), 1) == p

    def test_hazard_monotone_by_shape(self):
        k = np.arange(1, 101)
        for p in (0.05, 0.2, 0.35):
            rising = hazard(WeibullParams(p, 1.4), k)
            falling = hazard(WeibullParams(p, 0.6), k)
            flat = hazard(WeibullParams(p, 1.0), k)
            assert np.all(np.diff(rising) > 0)
            assert np.all(np.diff(falling) < 0)
            assert np.all(flat == p)

    def test_support_starts_at_one(self):
        params = WeibullParams(0.3, 1.2)
        for fn in (pmf, log_pmf, hazard):
            with pytest.raises(ValueError):
                fn(params, 0)

    def test_scalar_in_float_out(self):
        params = WeibullParams(0.3, 1.2)
        for fn in (survival, pmf, log_pmf, hazard):
            assert isinstance(fn(params, 3), float)

    @given(params_st, st.integers(min_value=1, max_value=500))
    def test_probability_ranges(self, params, k):
        s = survival(params, k)
        f = pmf(params, k)
        h = hazard(params, k)
        assert 0.0 <= s <= 1.0
        assert 0.0 <= f <= 1.0
        assert 0.0 <= h <= 1.0
        assert survival(params, k - 1) >= s

    @given(params_st)
    def test_survival_decreasing(self, params):
        s = survival(params, np.arange(0, 60, dtype=np.float64))
        assert np.all(np.diff(s) <= 0)


class TestGeometricCollapse:
    """At beta = 1 the distribution is geometric, bit for bit."""

    PS = np.linspace(0.02, 0.95, 25)

    def test_pmf_bit_exact(self):
        for p in self.PS:
            params = WeibullParams(float(p), 1.0)
            expected = p * (1.0 - p) ** (KS - 1.0)
            assert np.array_equal(pmf(params, KS), expected)

    def test_survival_bit_exact(self):
        for p in self.PS:
            params = WeibullParams(float(p), 1.0)
            assert np.array_equal(survival(params, KS), (1.0 - p) ** KS)

    def test_hazard_is_the_constant_p(self):
        for p in self.PS:
            h = hazard(WeibullParams(float(p), 1.0), KS)
            assert np.all(h == p)


class TestLogPmf:
    def test_agrees_with_linear_pmf(self):
        for p, b in GRID[::5]:
            params = WeibullParams(p, b)
            lp = log_pmf(params, KS)
            np.testing.assert_allclose(np.exp(lp), pmf(params, KS), rtol=1e-12, atol=0)

    def test_finite_where_linear_pmf_underflows(self):
        params = WeibullParams(0.5, 2.0)
        k = 80.0  # log survival ~ -4400, far below float underflow
        assert pmf(params, k) == 0.0
        lp = log_pmf(params, k)
        assert math.isfinite(lp)
        ref = oracles.log_pmf_mp(0.5, 2.0, 80, dps=3000)
        assert lp == pytest.approx(ref, rel=1e-10)

    def test_strictly_decreasing_deep_into_tail(self):
        params = WeibullParams(0.4, 1.8)
        lp = log_pmf(params, np.arange(2, 5000, dtype=np.float64))
        assert np.all(np.diff(lp) < 0)


class TestExpectedValue:
    def test_geometric_mean_is_reciprocal_p(self):
        for p in (0.05, 0.2, 0.5, 0.9):
            got = expected_value(WeibullParams(p, 1.0))
            assert got == pytest.approx(1.0 / p, rel=1e-12)

    def test_matches_high_precision_sum(self):
        cases = [(0.1, 0.7), (0.1, 1.3), (0.3, 0.5), (0.5, 2.0), (0.05, 1.0)]
        for p, b in cases:
            ref = oracles.expected_value_mp(p, b)
            assert expected_value(WeibullParams(p, b)) == pytest.approx(ref, rel=1e-10)

    def test_analytic_remainder_matches_brute_sum(self):
        # Moderate shape: the tail from k = 65536 on still has visible mass
        # but direct summation converges fast enough to serve as truth.
        from interpunct.weibull import _survival_tail

        params = WeibullParams(0.3, 0.35)
        k = np.arange(65536, 4_000_000, dtype=np.float64)
        terms = np.exp(params.log_q * np.power(k, params.beta))
        assert terms[-1] < 1e-25  # truncation error is negligible
        brute = float(terms.sum())
        assert _survival_tail(params, 65536) == pytest.approx(brute, rel=1e-9)

    def test_heavy_tail_beyond_brute_reach(self):
        # At beta this small the terms decay slower than any geometric
        # rate; millions of explicit terms still undershoot, and the
        # analytic remainder has to make up the difference.
        params = WeibullParams(0.98, 0.0986)
        e = expected_value(params)
        k = np.arange(0, 3_000_000, dtype=np.float64)
        partial = float(np.sum(np.exp(params.log_q * np.power(k, params.beta))))
        assert e > partial
        assert e == pytest.approx(oracles.expected_value_em_mp(0.98, 0.0986), rel=1e-8)

    def test_stop_above_short_circuits(self):
        params = WeibullParams(0.9, 0.05)
        capped = expected_value(params, stop_above=50.0)
        assert capped > 50.0
        assert capped < expected_value(params)

    def test_stop_above_no_effect_when_under_cap(self):
        params = WeibullParams(0.3, 1.0)
        assert expected_value(params, stop_above=1e9) == expected_value(params)

    def test_decreasing_in_both_parameters(self):
        assert expected_value(WeibullParams(0.2, 1.0)) > expected_value(WeibullParams(0.3, 1.0))
        assert expected_value(WeibullParams(0.2, 1.0)) > expected_value(WeibullParams(0.2, 1.4))


class TestSample:
    def test_deterministic_under_seed(self):
        params = WeibullParams(0.2, 1.3)
        assert np.array_equal(sample(params, 100, seed=7), sample(params, 100, seed=7))
        assert not np.array_equal(sample(params, 100, seed=7), sample(params, 100, seed=8))

    def test_support(self):
        values = sample(WeibullParams(0.5, 0.8), 10_000, seed=0)
        assert values.dtype == np.int64
        assert values.min() >= 1

    def test_matches_model_distribution(self):
        params = WeibullParams(0.25, 1.2)
        values = sample(params, 200_000, seed=3)
        for k in (1, 2, 3, 5, 8):
            emp = float(np.mean(values > k))
            assert emp == pytest.approx(survival(params, k), abs=4e-3)

    def test_zero_draws(self):
        assert sample(WeibullParams(0.3, 1.0), 0, seed=0).size == 0


class TestFit:
    def test_recovers_parameters_single_cell(self):
        true = WeibullParams(0.2, 1.3)
        fit = fit_mle(sample(true, 50_000, seed=11))
        assert fit.converged
        assert fit.params.p == pytest.approx(true.p, abs=0.01)
        assert fit.params.beta == pytest.approx(true.beta, abs=0.03)

    def test_log_likelihood_consistency(self):
        values = sample(WeibullParams(0.3, 0.9), 5_000, seed=2)
        fit = fit_mle(values)
        assert fit.log_likelihood == pytest.approx(log_likelihood(fit.params, values), rel=1e-9)
        assert fit.n == values.size

    def test_fit_is_a_likelihood_peak(self):
        values = sample(WeibullParams(0.3, 1.1), 20_000, seed=5)
        fit = fit_mle(values)
        base = log_likelihood(fit.params, values)
        for dp, db in ((0.01, 0.0), (-0.01, 0.0), (0.0, 0.05), (0.0, -0.05)):
            nearby = WeibullParams(fit.params.p + dp, fit.params.beta + db)
            assert log_likelihood(nearby, values) < base

    def test_result_within_bounds(self):
        fit = fit_mle(np.array([1, 1, 1, 1, 2]))
        assert P_BOUNDS[0] <= fit.params.p <= P_BOUNDS[1]
        assert BETA_BOUNDS[0] <= fit.params.beta <= BETA_BOUNDS[1]

    def test_degenerate_series_rejected(self):
        with pytest.raises(DegenerateSeriesError):
            fit_mle(np.array([4]))
        with pytest.raises(DegenerateSeriesError):
            fit_mle(np.array([4, 4, 4, 4]))

    def test_non_integer_intervals_rejected(self):
        with pytest.raises(ValueError):
            fit_mle(np.array([1.0, 2.5, 3.0]))

    def test_to_record_round_trips_scalars(self):
        fit = fit_mle(sample(WeibullParams(0.3, 1.0), 1_000, seed=1))
        rec = fit.to_record()
        assert rec["p"] == fit.params.p
        assert rec["beta"] == fit.params.beta
        assert set(rec) == {"p", "beta", "log_likelihood", "ff_rmse", "n", "converged"}


class TestFfRmse:
    def test_zero_for_exact_empirical_match(self):
        # A two-point series cannot match any Weibull CDF exactly, so build
        # the comparison the other way: rmse of the true parameters on a
        # large sample beats visibly wrong parameters.
        true = WeibullParams(0.3, 1.2)
        values = sample(true, 100_000, seed=9)
        close = ff_rmse(true, values)
        far = ff_rmse(WeibullParams(0.3, 2.5), values)
        assert close < far
        assert close < 0.01

    def test_empty_series_rejected(self):
        with pytest.raises(DegenerateSeriesError):
            ff_rmse(WeibullParams(0.3, 1.0), np.array([], dtype=np.int64))

    @given(params_st)
    @settings(max_examples=25)
    def test_bounded_by_one(self, params):
        values = np.array([1, 2, 2, 3, 7, 10])
        assert 0.0 <= ff_rmse(params, values) <= 1.0
