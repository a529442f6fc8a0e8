import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from ostat.distributions import Exponential, Laplace, Normal, Uniform01
from ostat.envelopes import Envelope, Additive, additive_band, ratio_band, reference_points
from ostat.errors import ConfigurationError, PreconditionError
from ostat.montecarlo import (CoverageReport, DeviationSummary, ExperimentConfig, coverage_experiment,
                              default_trim, rate_scaling_experiment, run_trials,
                              sup_deviation_experiment, trimmed_vs_full_experiment,
                              wilson_interval)


def _whole_line(model, n):
    ref = reference_points(model, n)
    return Envelope(n, np.full(n, -np.inf), np.full(n, np.inf), ref, 1.0, Additive(0.999))


class TestCoverage:
    def test_whole_line_band(self):
        cfg = ExperimentConfig(Normal(), 200, 300, seed=1, band=_whole_line(Normal(), 200))
        rep = coverage_experiment(cfg)
        assert rep.empirical_coverage == 1.0
        assert rep.hits == rep.trials == 300

    def test_additive_band_meets_nominal(self):
        band = additive_band(Uniform01(), 2000, 0.1)
        rep = coverage_experiment(ExperimentConfig(Uniform01(), 2000, 5000, seed=0, band=band))
        assert rep.empirical_coverage >= 0.963369 - 3 * rep.half_width

    def test_hit_matches_direct_check(self):
        band = additive_band(Laplace(), 50, 0.08)
        rec = run_trials(ExperimentConfig(Laplace(), 50, 400, seed=6, band=band))
        from ostat.sampler import sample_order_stats, stream
        direct = [band.contains(sample_order_stats(Laplace(), 50, stream(6, k)).values) for k in range(400)]
        np.testing.assert_array_equal(rec.covered, direct)
        assert 0 < rec.covered.sum() < 400

    def test_wider_band_never_loses_hits(self):
        n, trials = 300, 400
        prev = None
        for t in (0.03, 0.05, 0.08, 0.12):
            band = additive_band(Normal(), n, t)
            hit = run_trials(ExperimentConfig(Normal(), n, trials, seed=2, band=band)).covered
            if prev is not None:
                assert np.all(hit >= prev)
            prev = hit
        prev = None
        for T in (1.5, 2.0, 4.0):
            band = ratio_band(Exponential(), n, T)
            hit = run_trials(ExperimentConfig(Exponential(), n, trials, seed=2, band=band)).covered
            if prev is not None:
                assert np.all(hit >= prev)
            prev = hit

    def test_trim_restricts_hit_range(self):
        band = additive_band(Exponential(), 100, 0.05)
        full = coverage_experiment(ExperimentConfig(Exponential(), 100, 300, 3, band=band))
        trim = coverage_experiment(ExperimentConfig(Exponential(), 100, 300, 3, band=band, trim=10))
        assert trim.hits >= full.hits

    def test_requires_band(self):
        with pytest.raises(ConfigurationError):
            coverage_experiment(ExperimentConfig(Normal(), 10, 10))


class TestDeterminism:
    @pytest.mark.parametrize("workers", [2, 3])
    def test_worker_count_irrelevant(self, workers):
        band = additive_band(Normal(), 500, 0.05)
        cfg = ExperimentConfig(Normal(), 500, 37, seed=123, band=band, trim=2)
        a = run_trials(cfg, workers=1)
        b = run_trials(cfg, workers=workers)
        np.testing.assert_array_equal(a.sup_dev, b.sup_dev)
        np.testing.assert_array_equal(a.trimmed_sup_dev, b.trimmed_sup_dev)
        np.testing.assert_array_equal(a.covered, b.covered)

    def test_repeat(self):
        cfg = ExperimentConfig(Laplace(), 100, 20, seed=5)
        assert sup_deviation_experiment(cfg) == sup_deviation_experiment(cfg)
        np.testing.assert_array_equal(sup_deviation_experiment(cfg).values,
                                      sup_deviation_experiment(cfg).values)

    def test_records(self):
        rec = run_trials(ExperimentConfig(Normal(), 20, 3, seed=0, trim=1))
        rows = list(rec.records())
        assert [r["trial"] for r in rows] == [0, 1, 2]
        assert set(rows[0]) == {"trial", "sup_dev", "trimmed_sup_dev", "covered"}
        assert rows[0]["covered"] is None
        assert isinstance(rows[0]["sup_dev"], float)


class TestSupDeviation:
    def test_uniform_bounded_by_one(self):
        s = sup_deviation_experiment(ExperimentConfig(Uniform01(), 30, 500, seed=0))
        assert s.max <= 1.0

    def test_dual_of_additive_coverage(self):
        s = sup_deviation_experiment(ExperimentConfig(Uniform01(), 2000, 5000, seed=8))
        assert s.quantile(0.963) <= 0.1

    def test_uniform_matches_independent_sort(self):
        # sup deviation distribution from the spacings path vs sorted i.i.d. uniforms
        n, trials = 200, 3000
        s = sup_deviation_experiment(ExperimentConfig(Uniform01(), n, trials, seed=1)).values
        rng = np.random.default_rng(77)
        ref = np.arange(1, n + 1) / (n + 1)
        t = np.array([np.abs(np.sort(rng.random(n)) - ref).max() for _ in range(trials)])
        assert stats.ks_2samp(s, t).pvalue >= 1e-3

    def test_normal_medians_decrease(self):
        meds = [sup_deviation_experiment(ExperimentConfig(Normal(), n, 200, seed=0)).median
                for n in (1000, 10_000, 100_000)]
        assert meds[0] > meds[1] > meds[2]

    def test_summary_invariants(self):
        s = sup_deviation_experiment(ExperimentConfig(Exponential(), 100, 400, seed=4))
        assert s.median <= s.q90 <= s.q99 <= s.max
        assert s.trials == 400 and s.n == 100
        assert set(s.to_dict()) == {"median", "q90", "q99", "mean", "max"}

    def test_trimmed_summary(self):
        cfg = ExperimentConfig(Exponential(), 100, 50, seed=4, trim=3)
        full = run_trials(cfg)
        s = sup_deviation_experiment(cfg)
        np.testing.assert_array_equal(s.values, full.trimmed_sup_dev)


class TestTrimming:
    def test_zero_trim_equals_full(self):
        cmp = trimmed_vs_full_experiment(Exponential(), 500, 0, 100, seed=2)
        np.testing.assert_array_equal(cmp.trimmed.values, cmp.full.values)

    def test_subset_inclusion(self):
        cmp = trimmed_vs_full_experiment(Exponential(), 500, 3, 200, seed=2)
        assert np.all(cmp.trimmed.values <= cmp.full.values)
        assert cmp.trimmed.median <= cmp.full.median
        assert cmp.omega == 3

    def test_trimmed_range_by_hand(self):
        from ostat.sampler import sample_order_stats, stream
        n, w = 40, 4
        cmp = trimmed_vs_full_experiment(Laplace(), n, w, 5, seed=9)
        ref = reference_points(Laplace(), n)
        for k in range(5):
            x = sample_order_stats(Laplace(), n, stream(9, k)).values
            dev = np.abs(x - ref)
            # 1-based indices w..n-w inclusive
            assert cmp.trimmed.values[k] == dev[w - 1:n - w].max()

    def test_default_trim(self):
        assert default_trim(10_000) == 3
        assert default_trim(1000) == math.ceil(math.log(math.log(1000)))

    @pytest.mark.parametrize("n,trim", [(10, 5), (10, 7), (1, 1)])
    def test_bad_trim(self, n, trim):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(Normal(), n, 10, trim=trim)


class TestRateScaling:
    def test_ratios_positive(self):
        rows = rate_scaling_experiment(Normal(), 2.0, [100, 1000], 50, seed=0)
        assert [r.n for r in rows] == [100, 1000]
        for r in rows:
            assert r.ratio > 0 and math.isfinite(r.ratio)
            assert r.ratio == pytest.approx(r.median_sup_dev / r.rate)

    def test_precondition(self):
        with pytest.raises(PreconditionError):
            rate_scaling_experiment(Laplace(), 2.0, [100], 10)


class TestWilson:
    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 100_000), st.data())
    def test_endpoints_solve_score_equation(self, trials, data):
        hits = data.draw(st.integers(0, trials))
        lo, hi = wilson_interval(hits, trials)
        z = stats.norm.ppf(0.995)
        phat = hits / trials
        assert 0.0 <= lo <= phat <= hi <= 1.0
        # (phat - p)^2 = z^2 p (1 - p) / n at each interior endpoint
        for p in (lo, hi):
            if 0 < p < 1:
                assert (phat - p) ** 2 == pytest.approx(z * z * p * (1 - p) / trials, rel=1e-6, abs=1e-14)

    def test_all_hits(self):
        lo, hi = wilson_interval(5000, 5000)
        assert hi == 1.0
        z = stats.norm.ppf(0.995)
        assert lo == pytest.approx(5000 / (5000 + z * z), rel=1e-12)

    def test_report(self):
        rep = CoverageReport.from_hits(np.array([True] * 9 + [False]), 0.5)
        assert rep.hits == 9 and rep.trials == 10
        assert rep.wilson_interval[0] <= 0.9 <= rep.wilson_interval[1]
        assert rep.half_width == pytest.approx((rep.wilson_interval[1] - rep.wilson_interval[0]) / 2)
        d = rep.to_dict()
        assert set(d) == {"trials", "hits", "empirical", "wilson99", "nominal"}


def test_config_validation():
    with pytest.raises(ConfigurationError):
        ExperimentConfig(Normal(), 10, 0)
    with pytest.raises(ConfigurationError):
        ExperimentConfig(Normal(), 10, 5, band=additive_band(Normal(), 11, 0.1))


def test_deviation_summary_from_values():
    s = DeviationSummary.from_values(5, np.array([3.0, 1.0, 2.0]))
    assert (s.median, s.max, s.mean) == (2.0, 3.0, 2.0)
