import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from igmc.ecdf import (
    EmpiricalCdf,
    dkw_band,
    ks_distance,
    l1_distance_step_ref,
    l1_distance_step_step,
)
from igmc.errors import EmptyDomain, InvalidAlpha, QuadratureFailure
from igmc.reference import BetaRef, UniformRef, quantile

from oracles import ecdf_eval, step_l1_grid


def point_mass(x):
    return EmpiricalCdf([x], [1.0])


@st.composite
def lattice_steps(draw, lattice=1000, max_steps=12):
    """Random step CDF with breakpoints on multiples of 1/lattice inside [0, 1]."""
    k = draw(st.integers(1, max_steps))
    ticks = sorted(draw(st.sets(st.integers(0, lattice), min_size=k, max_size=k)))
    w = draw(st.lists(st.integers(1, 50), min_size=k, max_size=k))
    return EmpiricalCdf.from_weights([t / lattice for t in ticks], w)


class TestEmpiricalCdf:
    def test_from_samples_matches_count_definition(self):
        rng = np.random.default_rng(0)
        x = rng.integers(0, 20, 300) / 20
        f = EmpiricalCdf.from_samples(x)
        t = np.linspace(-0.1, 1.1, 241)
        np.testing.assert_array_equal(f(t), ecdf_eval(x, t))
        assert f.cumulative[-1] == 1.0

    def test_left_limit(self):
        f = EmpiricalCdf.from_samples([0.2, 0.5, 0.8])
        assert f.left_limit(0.5) == 1 / 3 and f(0.5) == 2 / 3
        assert f.left_limit(0.2) == 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            EmpiricalCdf([0.5, 0.2], [0.5, 1.0])
        with pytest.raises(ValueError):
            EmpiricalCdf([0.2, 0.5], [0.5, 0.9])
        with pytest.raises(ValueError):
            EmpiricalCdf([0.2, 0.5], [0.6, 0.5])

    def test_integral(self):
        f = EmpiricalCdf.from_samples([0.25, 0.75])
        assert f.integral(0.0, 1.0) == pytest.approx(0.5 * 0.5 + 0.25)


class TestL1StepStep:
    def test_identical(self):
        f = EmpiricalCdf.from_samples([0.1, 0.4, 0.4, 0.9])
        assert l1_distance_step_step(f, f, (0, 1)) == 0.0

    def test_point_masses(self):
        assert l1_distance_step_step(point_mass(0.0), point_mass(1.0), (0, 1)) == 1.0
        assert l1_distance_step_step(point_mass(0.25), point_mass(0.75), (0, 1)) == 0.5

    def test_empty_domain(self):
        with pytest.raises(EmptyDomain):
            l1_distance_step_step(point_mass(0.0), point_mass(1.0), (1, 1))
        with pytest.raises(EmptyDomain):
            l1_distance_step_step(point_mass(0.0), point_mass(1.0), (0, math.inf))

    @settings(max_examples=100, deadline=None)
    @given(lattice_steps(), lattice_steps())
    def test_metric_axioms(self, f, g):
        d = l1_distance_step_step(f, g, (0, 1))
        assert d >= 0
        assert d == pytest.approx(l1_distance_step_step(g, f, (0, 1)), abs=1e-15)
        if f == g:
            assert d == 0

    @settings(max_examples=60, deadline=None)
    @given(lattice_steps(), lattice_steps(), lattice_steps())
    def test_triangle(self, f, g, k):
        dom = (0.0, 1.0)
        assert l1_distance_step_step(f, k, dom) <= (
            l1_distance_step_step(f, g, dom) + l1_distance_step_step(g, k, dom) + 1e-15
        )

    def test_against_grid_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            pts = [np.sort(rng.choice(1001, size=rng.integers(1, 30), replace=False)) / 1000 for _ in range(2)]
            f, g = (EmpiricalCdf.from_weights(p, rng.integers(1, 10, p.size)) for p in pts)
            assert abs(l1_distance_step_step(f, g, (0, 1)) - step_l1_grid(f, g, 0, 1)) < 1e-9


class TestL1StepRef:
    def test_point_mass_vs_uniform(self):
        assert l1_distance_step_ref(point_mass(0.5), UniformRef(), (0, 1)) == pytest.approx(0.25, abs=1e-12)

    def test_quantile_staircase(self):
        # jumps at g's (k - 1/2)/N quantiles keep |f - g| <= 1/(2N) pointwise
        g = BetaRef(4, 5)
        n = 50
        qs = [quantile(g, (k - 0.5) / n) for k in range(1, n + 1)]
        f = EmpiricalCdf(qs, [k / n for k in range(1, n + 1)])
        val = l1_distance_step_ref(f, g, (0, 1))
        t = np.linspace(0, 1, 200_001)
        brute = np.trapezoid(np.abs(f(t) - np.array([g(x) for x in t])), t)
        assert val == pytest.approx(brute, abs=1e-5)
        assert val <= 1 / (2 * n) + 1e-6

    def test_beta_sample(self):
        rng = np.random.default_rng(12)
        f = EmpiricalCdf.from_samples(rng.beta(4, 5, 1000))
        assert l1_distance_step_ref(f, BetaRef(4, 5), (0, 1)) < 0.05

    def test_quadrature_fallback_matches_closed_form(self):
        class NoAntiderivative:
            def __init__(self, ref):
                self.ref = ref

            def __call__(self, t):
                return self.ref(t)

        rng = np.random.default_rng(3)
        f = EmpiricalCdf.from_samples(rng.beta(2, 3, 40))
        ref = BetaRef(2, 3)
        exact = l1_distance_step_ref(f, ref, (0, 1))
        quad = l1_distance_step_ref(f, NoAntiderivative(ref), (0, 1), tol=1e-9)
        assert quad == pytest.approx(exact, abs=1e-9)

    def test_quadrature_failure(self):
        def wiggly(t):
            return min(max(t + 0.3 * math.sin(1e6 * t) * t * (1 - t), 0.0), 1.0)

        with pytest.raises(QuadratureFailure):
            from igmc.ecdf import _integrate_cdf

            _integrate_cdf(wiggly, 0.0, 1.0, 1e-14, max_depth=5)

    def test_tol_must_be_positive(self):
        with pytest.raises(ValueError):
            l1_distance_step_ref(point_mass(0.5), UniformRef(), (0, 1), tol=0)


class TestKs:
    def test_quantile_midpoints(self):
        g = UniformRef()
        for n in (1, 4, 10, 37):
            f = EmpiricalCdf([(i - 0.5) / n for i in range(1, n + 1)], [i / n for i in range(1, n + 1)])
            # direct enumeration on a fine grid including both sides of every jump
            t = np.sort(np.concatenate([np.linspace(-0.1, 1.1, 10001), f.breakpoints, f.breakpoints - 1e-12]))
            brute = np.max(np.abs(f(t) - np.clip(t, 0, 1)))
            assert ks_distance(f, g) == pytest.approx(1 / (2 * n), abs=1e-12)
            assert brute == pytest.approx(1 / (2 * n), abs=1e-9)

    def test_point_mass_at_zero(self):
        assert ks_distance(point_mass(0.0), UniformRef()) == 1.0

    def test_identical_steps(self):
        f = EmpiricalCdf.from_samples([0.1, 0.3, 0.3, 0.7])
        assert ks_distance(f, f) == 0.0

    def test_left_limit_matters(self):
        # f jumps from 0 to 1 at 0.9; the largest gap is just before the jump
        assert ks_distance(point_mass(0.9), UniformRef()) == pytest.approx(0.9)


class TestDkw:
    def test_value(self):
        assert dkw_band(1000, 0.05) == pytest.approx(math.sqrt(math.log(40) / 2000))
        assert round(dkw_band(1000, 0.05), 5) == 0.04295

    @given(st.integers(1, 10_000), st.floats(0.001, 0.5))
    def test_round_trip(self, n, a):
        alpha = 2 * math.exp(-2 * n * a * a)
        if 1e-300 < alpha < 1:
            assert dkw_band(n, alpha) == pytest.approx(a, rel=1e-9)

    def test_scaling(self):
        assert dkw_band(400, 0.1) == pytest.approx(dkw_band(100, 0.1) / 2)

    def test_invalid_alpha(self):
        for alpha in (0.0, 1.0, -0.1, 2.0):
            with pytest.raises(InvalidAlpha):
                dkw_band(10, alpha)
