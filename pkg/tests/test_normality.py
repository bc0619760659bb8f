"""Normality gate vs scipy's reference implementation and its own contracts."""

import numpy as np
import pytest
from scipy import stats as sps

from sigkit.errors import DegenerateSample, InsufficientData, InvalidArgument
from sigkit.normality import MIN_SAMPLES, NormalityReport, dagostino_k2


class TestDagostinoK2:
    def test_matches_scipy_normaltest(self):
        rng = np.random.default_rng(101)
        for n in (20, 21, 35, 100, 500):
            for draw in (rng.normal, rng.exponential, rng.standard_cauchy):
                x = draw(size=n)
                r = dagostino_k2(x)
                stat_ref, p_ref = sps.normaltest(x)
                assert r.statistic == pytest.approx(stat_ref, rel=1e-10)
                assert r.p_value == pytest.approx(p_ref, rel=1e-9, abs=1e-300)

    def test_symmetric_sample_has_zero_skew_component(self):
        # x and -x paired: odd moments cancel, so the skewness term is 0
        # and K^2 reduces to the kurtosis z squared
        rng = np.random.default_rng(7)
        half = rng.normal(size=25)
        x = np.concatenate([half, -half])
        r = dagostino_k2(x)
        _, p_kurt = sps.kurtosistest(x)
        z_kurt = sps.norm.isf(p_kurt / 2)
        assert r.statistic == pytest.approx(z_kurt**2, rel=1e-8)

    def test_normal_sample_passes(self):
        rng = np.random.default_rng(11)
        x = rng.normal(size=10_000)
        r = dagostino_k2(x)
        assert r.passed
        assert r.p_value > 0.05

    def test_exponential_sample_fails_hard(self):
        rng = np.random.default_rng(13)
        x = rng.exponential(size=10_000)
        r = dagostino_k2(x)
        assert r.p_value < 0.001
        assert not r.passed

    def test_affine_invariance(self):
        rng = np.random.default_rng(17)
        x = rng.normal(size=60)
        base = dagostino_k2(x)
        moved = dagostino_k2(-2.0 * x + 7.0)
        # skewness flips sign under lam < 0 but enters squared
        assert moved.statistic == pytest.approx(base.statistic, rel=1e-9)
        assert moved.p_value == pytest.approx(base.p_value, rel=1e-9)

    def test_null_calibration(self):
        # under the normal null the rejection rate at 0.05 must be close
        # to nominal; a quick 2000-trial version of the full Monte Carlo
        rng = np.random.default_rng(19)
        trials = 2000
        rejects = 0
        for _ in range(trials):
            if not dagostino_k2(rng.normal(size=100)).passed:
                rejects += 1
        assert 0.03 <= rejects / trials <= 0.07

    def test_insufficient_data(self):
        with pytest.raises(InsufficientData):
            dagostino_k2(np.zeros(MIN_SAMPLES - 1) + np.arange(MIN_SAMPLES - 1))

    def test_boundary_n_20_works(self):
        rng = np.random.default_rng(23)
        r = dagostino_k2(rng.normal(size=20))
        assert 0.0 <= r.p_value <= 1.0
        assert r.n == 20

    def test_zero_variance_degenerate(self):
        with pytest.raises(DegenerateSample):
            dagostino_k2(np.full(30, 1.5))

    def test_bad_inputs(self):
        rng = np.random.default_rng(29)
        x = rng.normal(size=30)
        with pytest.raises(InvalidArgument):
            dagostino_k2(x, alpha_norm=0.0)
        with pytest.raises(InvalidArgument):
            dagostino_k2(x.reshape(6, 5))
        y = x.copy()
        y[3] = np.nan
        with pytest.raises(InvalidArgument):
            dagostino_k2(y)

    def test_pass_threshold_uses_alpha_norm(self):
        rng = np.random.default_rng(31)
        x = rng.normal(size=200)
        r = dagostino_k2(x)
        # same sample at a level above the p-value must flip the verdict
        tight = dagostino_k2(x, alpha_norm=min(0.999, float(r.p_value) + 1e-9))
        assert r.statistic == tight.statistic
        assert not tight.passed

    def test_report_invariant(self):
        r = NormalityReport(statistic=1.0, p_value=0.4, n=30, alpha_norm=0.05)
        assert r.passed
        r2 = NormalityReport(statistic=9.0, p_value=0.01, n=30, alpha_norm=0.05)
        assert not r2.passed
