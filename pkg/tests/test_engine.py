import math

import numpy as np
import pytest

from igmc.engine import IgmcConfig, posterior_cdf, run_chain, run_igmc, PosteriorSamples
from igmc.errors import EmptySampleSet, NonBinaryValue
from igmc.generative import BERNOULLI, EXPONENTIAL, SampleSet, Support
from igmc.rng import splitmix64, stream, stream_seed


def bern_set(m, a):
    return SampleSet([1.0] * a + [0.0] * (m - a), Support.BINARY)


class ConstantModel:
    support = Support.UNIT_INTERVAL

    def __init__(self, value):
        self.value = value

    def sample(self, rng):
        rng.random()
        return self.value

    def mean(self):
        return self.value


class ConstantApproach:
    """Stub approach written only against the protocol."""

    name = "constant"

    def fit(self, s):
        return ConstantModel(0.25)


class TestRng:
    def test_splitmix64_reference_values(self):
        # first outputs of the reference SplitMix64 generator seeded with 0
        assert splitmix64(0) == 0xE220A8397B1DCDAF
        assert splitmix64(0x9E3779B97F4A7C15) == 0x6E789E6AA1B965F4

    def test_streams_differ_by_index_and_master(self):
        seeds = {stream_seed(m, i) for m in range(5) for i in range(100)}
        assert len(seeds) == 500

    def test_stream_reproducible(self):
        assert stream(3, 7).random() == stream(3, 7).random()


class TestRunChain:
    def test_single_step_values(self):
        mu = run_chain(bern_set(9, 4), BERNOULLI, 1, np.random.default_rng(0))
        assert mu in (4 / 10, 5 / 10)

    def test_all_ones_absorbs(self):
        for h in (1, 10, 100):
            assert run_chain(bern_set(5, 5), BERNOULLI, h, np.random.default_rng(h)) == 1.0

    def test_arithmetic_of_one_success(self):
        class AlwaysOne:
            def random(self):
                return 0.0  # u < p for any p > 0

        assert run_chain(bern_set(2, 1), BERNOULLI, 1, AlwaysOne()) == 2 / 3

    def test_initial_set_not_mutated(self):
        s = bern_set(9, 4)
        run_chain(s, BERNOULLI, 50, np.random.default_rng(0))
        assert len(s) == 9 and s.total == 4.0

    def test_trace_and_bounded_increments(self):
        m = 9
        trace = []
        mu = run_chain(bern_set(m, 4), BERNOULLI, 200, np.random.default_rng(4), trace=trace)
        assert len(trace) == 201 and trace[0] == 4 / 9 and trace[-1] == mu
        for k in range(1, len(trace)):
            assert abs(trace[k] - trace[k - 1]) <= 2 / (k + m)

    def test_propagates_fit_errors(self):
        with pytest.raises(NonBinaryValue):
            run_chain(SampleSet([0.5], "unit_interval"), BERNOULLI, 1, np.random.default_rng(0))

    def test_requires_data(self):
        with pytest.raises(EmptySampleSet):
            run_chain(SampleSet([], "binary"), BERNOULLI, 1, np.random.default_rng(0))

    def test_accepts_external_approach(self):
        mu = run_chain(SampleSet([0.25], "unit_interval"), ConstantApproach(), 3, np.random.default_rng(0))
        assert mu == 0.25


class TestRunIgmc:
    def test_all_ones(self):
        p = run_igmc(bern_set(4, 4), BERNOULLI, IgmcConfig(3, 5, 0))
        assert p.mus.tolist() == [1.0, 1.0, 1.0]

    def test_deterministic(self):
        cfg = IgmcConfig(50, 30, 11)
        a = run_igmc(bern_set(9, 4), BERNOULLI, cfg)
        b = run_igmc(bern_set(9, 4), BERNOULLI, cfg)
        assert np.array_equal(a.mus, b.mus)

    def test_threads_do_not_change_output(self):
        cfg = IgmcConfig(40, 25, 3)
        seq = run_igmc(SampleSet([2.0] * 5, "nonneg_reals"), EXPONENTIAL, cfg, threads=1)
        par = run_igmc(SampleSet([2.0] * 5, "nonneg_reals"), EXPONENTIAL, cfg, threads=8)
        assert seq.mus.tobytes() == par.mus.tobytes()

    def test_chain_n_uses_stream_n(self):
        cfg = IgmcConfig(5, 20, 42)
        p = run_igmc(bern_set(9, 4), BERNOULLI, cfg)
        assert p.mus[3] == run_chain(bern_set(9, 4), BERNOULLI, 20, stream(42, 3))

    def test_mu_is_mean_of_grown_set(self):
        p = run_igmc(bern_set(9, 4), BERNOULLI, IgmcConfig(200, 10, 1))
        # 4 + (successes among 10) over 19
        assert np.all(np.isin(np.round(p.mus * 19, 9), np.arange(4, 15)))
        assert len(p) == 200 and p.initial_size == 9

    def test_posterior_mean_is_observed_mean(self):
        p = run_igmc(bern_set(9, 4), BERNOULLI, IgmcConfig(10_000, 100, 5))
        se = p.mus.std(ddof=1) / math.sqrt(p.mus.size)
        assert abs(p.mus.mean() - 4 / 9) < 5 * se

    def test_config_validation(self):
        with pytest.raises(ValueError):
            IgmcConfig(0, 1, 0)
        with pytest.raises(ValueError):
            IgmcConfig(1, 0, 0)
        with pytest.raises(ValueError):
            IgmcConfig(1, 1, -1)


class TestPosteriorCdf:
    def cdf(self, mus):
        return posterior_cdf(PosteriorSamples(np.array(mus), IgmcConfig(len(mus), 1, 0), 1))

    def test_le_convention(self):
        assert self.cdf([0.5])(0.5) == 1.0

    def test_values(self):
        f = self.cdf([0.2, 0.5, 0.8])
        assert f(0.5) == 2 / 3
        assert f(0.1) == 0.0
        assert f(0.8) == 1.0 and f(5.0) == 1.0
        assert f(0.19999) == 0.0

    def test_shape(self):
        rng = np.random.default_rng(0)
        mus = rng.random(100)
        f = self.cdf(mus)
        grid = np.linspace(-0.5, 1.5, 2001)
        vals = f(grid)
        assert np.all(np.diff(vals) >= 0)
        assert np.all(vals[grid < mus.min()] == 0) and np.all(vals[grid >= mus.max()] == 1)


def test_chain_independence():
    # paired chains (2i, 2i+1) of the same run should be uncorrelated
    p = run_igmc(bern_set(9, 4), BERNOULLI, IgmcConfig(20_000, 20, 8))
    a, b = p.mus[0::2], p.mus[1::2]
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.05
