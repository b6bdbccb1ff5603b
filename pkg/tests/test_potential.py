import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morseactions.errors import ParamOutOfBox, WidthExceedsAnalyticity
from morseactions.potential import (
    TrigSeries,
    make_potential,
    pendulum_potential,
    strip_sup_bound,
    sup_fourier_norm,
)


class TestEval:
    def test_single_harmonic_value(self, pendulum_pot):
        assert pendulum_pot.eval(0.0) == pytest.approx(-1.0, abs=1e-15)

    def test_first_derivative(self, pendulum_pot):
        # F' = sin(theta)
        assert pendulum_pot.eval(math.pi / 2, order=1) == pytest.approx(1.0, abs=1e-15)

    def test_second_derivative_two_harmonics(self):
        pot = make_potential(cos=[-1.0, 0.3], s0=1.0)
        # F'' (0) = cos 0 - 0.3 * 4 cos 0
        assert pot.eval(0.0, order=2) == pytest.approx(-0.2, abs=1e-14)

    def test_order_out_of_range(self, pendulum_pot):
        with pytest.raises(ValueError):
            pendulum_pot.eval(0.0, order=4)

    def test_param_out_of_box(self):
        pot = make_potential(cos=[[-1.0, 0.1]], s0=1.0, param_box=[(-1, 1)])
        with pytest.raises(ParamOutOfBox):
            pot.eval(0.0, [2.0])
        with pytest.raises(ParamOutOfBox):
            pot.eval(0.0, [0.0, 0.0])

    def test_periodicity(self, pendulum_pot):
        th = np.linspace(-3.0, 3.0, 17)
        a = pendulum_pot.eval(th)
        b = pendulum_pot.eval(th + 2 * np.pi)
        assert np.all(np.abs(a - b) <= 1e-14 * (1.0 + np.abs(a)))

    @pytest.mark.parametrize("h", [1e-3, 1e-4])
    def test_fd_quadratic_convergence(self, h):
        pot = make_potential(cos=[-1.0, 0.4, 0.0], sin=[0.2, 0.0, 0.1], s0=1.0)
        th = np.linspace(-3, 3, 11)
        fd = (pot.eval(th + h) - pot.eval(th - h)) / (2 * h)
        exact = pot.eval(th, order=1)
        # centered differences are O(h^2); constant ~ max|F'''|/6
        C = np.max(np.abs(pot.eval(np.linspace(-np.pi, np.pi, 400), order=3))) / 6
        assert np.max(np.abs(fd - exact)) <= 1.1 * C * h * h + 1e-12


class TestNorms:
    def test_cosine_norm_at_s0(self):
        eta, s0 = 0.7, 1.3
        pot = pendulum_potential(eta=eta, s0=s0)
        assert sup_fourier_norm(pot, s0) == pytest.approx(eta * math.exp(s0) / 2, rel=1e-15)

    def test_cosine_norm_at_zero(self, pendulum_pot):
        assert sup_fourier_norm(pendulum_pot, 0.0) == pytest.approx(0.5, rel=1e-15)

    def test_strip_bound_cosine(self, pendulum_pot):
        assert strip_sup_bound(pendulum_pot, 1.0) == pytest.approx(math.cosh(1.0), rel=1e-15)

    def test_two_harmonic_max(self):
        pot = make_potential(cos=[-0.5, 0.0, 0.01], s0=1.0)
        # brute force over k of |f_k| e^{ks}
        s = 0.8
        expected = max(0.25 * math.exp(s), 0.005 * math.exp(3 * s))
        assert sup_fourier_norm(pot, s) == pytest.approx(expected, rel=1e-15)

    def test_width_exceeds(self, pendulum_pot):
        with pytest.raises(WidthExceedsAnalyticity):
            sup_fourier_norm(pendulum_pot, 1.5)

    def test_shift_invariance(self):
        pot = make_potential(cos=[-1.0, 0.3], sin=[0.2], s0=1.0)
        shifted = pot.series_at().translated(0.93)
        k = np.arange(1, pot.K + 1)
        orig = pot.series_at()
        n_orig = np.max(0.5 * np.hypot(orig.a, orig.b) * np.exp(k * 0.7))
        n_shift = np.max(0.5 * np.hypot(shifted.a, shifted.b) * np.exp(k * 0.7))
        assert n_shift == pytest.approx(n_orig, rel=1e-14)

    def test_interval_bound_over_box(self):
        pot = make_potential(cos=[[[-1.0], [0.5]], [[0.0, 0.2]]], s0=1.0,
                             param_box=[(-1, 1), (-1, 1)])
        # |f_1| max at p1 = -1 -> 1.5/2; |f_2| max at |p2| = 1 -> 0.2/2
        assert sup_fourier_norm(pot, 0.0) == pytest.approx(0.75, rel=1e-14)
        # brute force over a parameter grid never exceeds the bound
        grid = np.linspace(-1, 1, 7)
        worst = max(sup_fourier_norm(pot, 0.0, [a, b]) for a in grid for b in grid)
        assert worst <= 0.75 + 1e-14


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-2, 2, allow_nan=False), min_size=2, max_size=5),
       st.floats(-3, 3, allow_nan=False))
def test_derivative_consistency_property(coeffs, theta):
    pot = make_potential(cos=coeffs, sin=coeffs[::-1], s0=0.5)
    h = 1e-5
    fd = (pot.eval(theta + h, order=1) - pot.eval(theta - h, order=1)) / (2 * h)
    assert fd == pytest.approx(pot.eval(theta, order=2), abs=1e-6 * (1 + sum(map(abs, coeffs))))


class TestCenteredSeries:
    def test_delta_matches_direct(self, rng):
        s = TrigSeries(rng.normal(size=4), rng.normal(size=4), 0.3)
        c = s.centered(1.234)
        for u in [0.5, 1e-3, 1e-8]:
            direct = s.eval(1.234 + u) - s.eval(1.234)
            assert c.delta(u) == pytest.approx(direct, abs=1e-12 * (1 + abs(direct)))

    def test_delta_relative_accuracy_tiny_u(self):
        s = TrigSeries([-1.0], [0.0])
        c = s.centered(0.0)
        u = 1e-8
        # exact: 1 - cos(u) = 2 sin^2(u/2)
        exact = 2 * math.sin(u / 2) ** 2
        assert c.delta(u) == pytest.approx(exact, rel=1e-13)

    def test_dvalue(self, rng):
        s = TrigSeries(rng.normal(size=3), rng.normal(size=3))
        c = s.centered(-0.7)
        for u in [0.3, 1e-6]:
            assert c.dvalue(u) == pytest.approx(s.eval(-0.7 + u, 1), abs=1e-13)

    def test_from_samples_roundtrip(self):
        s = TrigSeries([-1.0, 0.25], [0.1, 0.0], 0.05)
        th = 2 * np.pi * np.arange(16) / 16
        s2 = TrigSeries.from_samples(s.eval(th))
        thq = np.linspace(0, 2 * np.pi, 33)
        assert np.max(np.abs(s.eval(thq) - s2.eval(thq))) < 1e-13
