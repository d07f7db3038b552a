import numpy as np
import pytest
from scipy import integrate

from isacsim.special import (
    EULER_GAMMA,
    WishartMaxEig,
    e1_scaled,
    expint_ei,
    rate_integral_exp,
    rate_integral_exp_asymptote,
    water_fill,
)


def ei_quadrature(x):
    # Ei(x) = -int_{-x}^{inf} e^{-t}/t dt for x < 0, integrable quadrature oracle
    val, _ = integrate.quad(lambda t: np.exp(-t) / t, -x, np.inf, limit=400)
    return -val


class TestExpintEi:
    def test_frozen_values(self):
        assert expint_ei(-1.0) == pytest.approx(-0.21938393439552029, rel=1e-12)
        assert expint_ei(-10.0) == pytest.approx(-4.15696892968532e-06, rel=1e-9)

    def test_against_quadrature(self):
        for x in [-1e-8, -1e-3, -0.1, -0.5, -1.0, -2.0, -5.9, -6.1, -8.0, -20.0, -50.0]:
            assert expint_ei(x) == pytest.approx(ei_quadrature(x), rel=1e-10)

    def test_series_cf_agree_at_cutoff(self):
        # both branches must agree near the switch point
        for x in [-5.999, -6.001]:
            assert expint_ei(x) == pytest.approx(ei_quadrature(x), rel=1e-10)

    def test_rejects_nonnegative(self):
        with pytest.raises(ValueError):
            expint_ei(0.0)
        with pytest.raises(ValueError):
            expint_ei(1.0)

    def test_e1_scaled_no_overflow(self):
        # e^z E1(z) ~ 1/z for large z; plain Ei would overflow far earlier
        z = 1e6
        assert e1_scaled(z) == pytest.approx(1.0 / z, rel=1e-5)


class TestRateIntegral:
    def test_unit_gain_identity(self):
        # E{log2(1+X)} = -e * Ei(-1) / ln 2
        assert rate_integral_exp(1.0) == pytest.approx(0.86035, abs=1e-5)

    def test_against_numeric_expectation(self):
        for a in [1e-4, 0.01, 0.5, 1.0, 10.0, 1e4]:
            val, _ = integrate.quad(
                lambda x: np.log2(1.0 + a * x) * np.exp(-x), 0, np.inf, limit=400
            )
            assert rate_integral_exp(a) == pytest.approx(val, rel=1e-8)

    def test_zero_gain(self):
        assert rate_integral_exp(0.0) == 0.0

    def test_monotone_and_concave_shape(self):
        a = np.logspace(-3, 6, 40)
        r = rate_integral_exp(a)
        assert np.all(np.diff(r) > 0)

    def test_asymptote(self):
        a = 1e6
        exact = rate_integral_exp(a)
        approx = rate_integral_exp_asymptote(a)
        assert exact == pytest.approx(approx, rel=1e-5)
        assert approx == pytest.approx(np.log2(a) - EULER_GAMMA / np.log(2), rel=1e-14)

    def test_vectorized(self):
        a = np.array([0.0, 1.0, 10.0])
        r = rate_integral_exp(a)
        assert r.shape == (3,)
        assert r[0] == 0.0
        assert r[1] == pytest.approx(rate_integral_exp(1.0), rel=1e-14)


class TestWaterFill:
    def test_two_channel_hand_computed(self):
        # gains (1, 0.5), budget 3: level w solves (w-1) + (w-2) = 3 => w = 3
        sol = water_fill([1.0, 0.5], 3.0)
        assert sol.allocation == pytest.approx([2.0, 1.0], abs=1e-10)
        assert sol.multiplier == pytest.approx(1.0 / 3.0, rel=1e-10)
        assert sol.objective == pytest.approx(np.log2(3.0) + np.log2(1.5), rel=1e-12)

    def test_inactive_channel(self):
        sol = water_fill([10.0, 0.01], 1.0)
        # weak channel needs level > 100 to activate; it stays off
        assert sol.allocation[1] == 0.0
        assert sol.allocation[0] == pytest.approx(1.0, abs=1e-12)

    def test_kkt_conditions_random(self):
        rng = np.random.default_rng(1234)
        for _ in range(300):
            m = rng.integers(1, 9)
            g = rng.uniform(0.0, 5.0, m)
            g[rng.random(m) < 0.2] = 0.0
            budget = float(rng.uniform(0.0, 50.0))
            sol = water_fill(g, budget)
            s = sol.allocation
            assert np.all(s >= 0)
            if budget > 0 and np.any(g > 0):
                assert np.sum(s) == pytest.approx(budget, abs=1e-9 * max(1.0, budget))
                w = 1.0 / sol.multiplier
                on = s > 1e-12
                # active: w = s + 1/g; inactive: 1/g >= w
                assert np.allclose(s[on] + 1.0 / g[on], w, atol=1e-9)
                off = (~on) & (g > 0)
                assert np.all(1.0 / g[off] >= w - 1e-9)

    def test_beats_grid_search(self):
        g = np.array([3.0, 1.2, 0.4])
        budget = 2.0
        sol = water_fill(g, budget)
        t = np.linspace(0, 1, 101)
        a, b = np.meshgrid(t, t, indexing="ij")
        mask = a + b <= 1.0
        s1 = a[mask] * budget
        s2 = b[mask] * budget
        s3 = budget - s1 - s2
        obj = (
            np.log2(1 + g[0] * s1) + np.log2(1 + g[1] * s2) + np.log2(1 + g[2] * s3)
        )
        assert sol.objective >= obj.max() - 1e-9

    def test_degenerate_zero_gains(self):
        sol = water_fill([0.0, 0.0], 4.0)
        assert sol.degenerate
        assert np.all(sol.allocation == 0.0)
        assert sol.objective == 0.0

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            water_fill([-1.0, 2.0], 1.0)
        with pytest.raises(ValueError):
            water_fill([1.0], -0.5)


class TestWishartMaxEig:
    def test_scalar_case_is_exponential(self):
        d = WishartMaxEig(1, 1)
        x = np.array([0.1, 1.0, 3.0])
        assert d.cdf(x) == pytest.approx(1.0 - np.exp(-x), rel=1e-12)
        assert d.pdf(x) == pytest.approx(np.exp(-x), rel=1e-12)

    def test_cdf_limits(self):
        for m, n in [(2, 2), (2, 4), (4, 4)]:
            d = WishartMaxEig(m, n)
            assert d.cdf(0.0) == 0.0
            assert d.cdf(1e4) == pytest.approx(1.0, abs=1e-12)

    def test_pdf_is_cdf_derivative(self):
        d = WishartMaxEig(3, 5)
        for x in [0.5, 2.0, 8.0, 15.0]:
            h = 1e-6 * max(1.0, x)
            num = (d.cdf(x + h) - d.cdf(x - h)) / (2 * h)
            assert d.pdf(x) == pytest.approx(num, rel=1e-6)

    def test_pdf_normalizes(self):
        d = WishartMaxEig(4, 4)
        val, _ = integrate.quad(d.pdf, 0, np.inf, limit=400)
        assert val == pytest.approx(1.0, abs=1e-9)

    def test_cdf_against_monte_carlo(self):
        d = WishartMaxEig(2, 2)
        rng = np.random.default_rng(77)
        samples = d.sample(200_000, rng)
        for x in [1.0, 3.0, 6.0]:
            p = d.cdf(x)
            phat = np.mean(samples <= x)
            se = np.sqrt(p * (1 - p) / samples.size)
            assert abs(phat - p) <= 4 * se

    def test_small_x_power_law(self):
        # cdf(x) ~ c x^{mn} as x -> 0; the (2,2) constant is 1/12, checked
        # against the determinant expansion at two decades
        d = WishartMaxEig(2, 2)
        for x in [1e-2, 1e-3]:
            assert d.cdf(x) / x**4 == pytest.approx(1.0 / 12.0, rel=0.02)

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            WishartMaxEig(3, 2)
        with pytest.raises(ValueError):
            WishartMaxEig(0, 1)
