import math

import numpy as np
import pytest

from morseactions.actions import branch_invert, cosine_like_check, sqrt_factor
from morseactions.errors import (
    BoundViolated,
    EnergyOutOfBranch,
    NoCriticalPoints,
    NonDistinctCriticalValues,
    TooCloseToSeparatrix,
)
from morseactions.morse import continue_critical, morse_check
from morseactions.potential import make_potential, pendulum_potential


class TestMorseCheck:
    def test_pendulum_values(self, pendulum_pot):
        md = morse_check(pendulum_pot)
        assert md.n_wells == 1
        assert md.crit_points[0] == pytest.approx(-math.pi)
        assert md.crit_points[1] == pytest.approx(0.0, abs=1e-12)
        assert md.crit_points[2] == pytest.approx(math.pi)
        assert md.crit_energies[1] == pytest.approx(-1.0, abs=1e-14)
        assert md.crit_energies[2] == pytest.approx(1.0, abs=1e-14)
        assert md.beta == pytest.approx(1.0, rel=1e-9)
        assert md.M == pytest.approx(math.cosh(1.0), rel=1e-15)

    def test_symmetric_double_well_rejected(self):
        pot = make_potential(cos=[-1.0, 0.3], s0=1.0)
        with pytest.raises(NonDistinctCriticalValues):
            morse_check(pot)

    def test_translation_invariance(self):
        c = 0.7
        pot = make_potential(cos=[-math.cos(c)], sin=[-math.sin(c)], s0=1.0)
        md = morse_check(pot)
        ref = morse_check(pendulum_potential())
        assert md.n_wells == ref.n_wells
        assert md.beta == pytest.approx(ref.beta, rel=1e-9)
        assert md.M == pytest.approx(ref.M, rel=1e-14)
        assert md.offset == pytest.approx(c, abs=1e-10)
        assert np.allclose(md.crit_points, ref.crit_points, atol=1e-10)

    def test_constant_potential(self):
        pot = make_potential(cos=[0.0], s0=1.0)
        with pytest.raises(NoCriticalPoints):
            morse_check(pot)

    def test_twowell_structure(self, twowell):
        md = twowell.morse
        assert md.n_wells == 2
        # alternation: odd minima below even maxima
        E = md.crit_energies
        assert E[1] < E[2] and E[3] < E[2] and E[2] < E[4]

    def test_gap_and_count_invariants(self, pendulum, twowell):
        for system in (pendulum, twowell):
            md = system.morse
            gaps = np.diff(md.crit_points)
            assert np.all(gaps >= 2 * md.theta_star * (1 - 1e-9))
            assert md.n_wells <= math.pi / (2 * md.theta_star) + 1e-12

    def test_consistency_bounds(self, pendulum, twowell):
        for system in (pendulum, twowell):
            md = system.morse
            assert md.beta <= 2 * md.M * (1 + 1e-12)
            assert md.beta * md.s0 <= 2 * md.M * (1 + 1e-12)
            assert md.beta * md.s0 ** 2 <= 4 * md.M * (1 + 1e-12)

    def test_derivative_floor_away_from_critical(self, pendulum, twowell):
        # min over clipped branch interiors of |F'| >= beta^2 s0^3 / (32 M)
        for system in (pendulum, twowell):
            md = system.morse
            floor = md.beta ** 2 * md.s0 ** 3 / (32 * md.M)
            half = md.theta_sharp / 2
            for i in range(1, 2 * md.n_wells + 1):
                a = md.crit_points[i - 1] + half
                b = md.crit_points[i] - half
                th = np.linspace(a, b, 400)
                assert np.min(np.abs(system.series.eval(th, 1))) >= floor


class TestContinuation:
    def test_unperturbed_is_exact(self, pendulum_pot):
        md = morse_check(pendulum_pot)
        cont = continue_critical(pendulum_pot, md, eta=0.0)
        assert np.allclose(cont.theta, md.crit_points, atol=1e-14)
        assert np.allclose(cont.energy, md.crit_energies, atol=1e-14)

    def test_closed_form_shift(self, pendulum_pot):
        eta = 1e-3
        md = morse_check(pendulum_pot)
        G = make_potential(cos=[-1.0], sin=[eta], s0=1.0)
        cont = continue_critical(G, md, eta=eta)
        # critical point of -cos + eta sin at -atan(eta)
        assert cont.theta[1] == pytest.approx(-math.atan(eta), abs=1e-12)

    def test_displacement_bounds(self, pendulum_pot):
        eta = 1e-4
        md = morse_check(pendulum_pot)
        G = make_potential(cos=[-1.0], sin=[eta], s0=1.0)
        cont = continue_critical(G, md, eta=eta)
        disp = np.max(np.abs(cont.theta - md.crit_points))
        assert disp <= 2 * eta / (md.beta * md.s0)
        edisp = np.max(np.abs(cont.energy - md.crit_energies))
        assert edisp <= 2 * eta

    def test_bound_violation_reported(self, pendulum_pot):
        md = morse_check(pendulum_pot)
        G = make_potential(cos=[-1.0], sin=[0.01], s0=1.0)
        with pytest.raises(BoundViolated):
            continue_critical(G, md, eta=1e-6)  # declared eta far too small


class TestBranchInvert:
    def test_arccos_examples(self, pendulum_pot):
        assert branch_invert(pendulum_pot, 2, 0.0) == pytest.approx(math.pi / 2, abs=1e-12)
        assert branch_invert(pendulum_pot, 1, -0.5) == pytest.approx(-math.pi / 3, abs=1e-12)

    def test_endpoint_continuity(self, pendulum):
        th = pendulum.branch_invert(2, -1.0 + 1e-14)
        assert th == pytest.approx(0.0, abs=1e-6)

    def test_monotone_orientation(self, twowell):
        E = np.linspace(*sorted([twowell.En[1] + 1e-6, twowell.En[2] - 1e-6]), 20)
        th2 = twowell.branch_invert(2, E)
        assert np.all(np.diff(th2) > 0)   # even branch increasing
        th1 = twowell.branch_invert(1, E)
        assert np.all(np.diff(th1) < 0)   # odd branch decreasing

    def test_roundtrip_identity(self, pendulum, twowell):
        for system in (pendulum, twowell):
            for i in range(1, 2 * system.N + 1):
                a, b = system.branch_interval(i)
                th = np.linspace(a + 1e-4, b - 1e-4, 100)
                E = system.series.eval(th, 0)
                back = system.branch_invert(i, E)
                assert np.max(np.abs(back - th)) <= 1e-10

    def test_energy_out_of_branch(self, pendulum):
        with pytest.raises(EnergyOutOfBranch):
            pendulum.branch_invert(1, 1.5)


class TestSqrtFactor:
    def test_limit_value(self, pendulum_pot):
        assert sqrt_factor(pendulum_pot, 1, -1, 0.0) == pytest.approx(math.sqrt(2), rel=1e-14)
        assert sqrt_factor(pendulum_pot, 2, -1, 0.0) == pytest.approx(math.sqrt(2), rel=1e-14)

    def test_closed_form(self, pendulum_pot):
        y = 0.1
        # Theta_2(-1 + y^2) = arccos(1 - y^2)
        expected = math.acos(1 - y * y) / y
        assert sqrt_factor(pendulum_pot, 2, -1, y) == pytest.approx(expected, abs=1e-12)

    def test_mirror_symmetric_well(self, pendulum_pot):
        # the pendulum well is symmetric: both factors coincide and the
        # mirror relation maps negative arguments across the minimum
        for y in (0.05, 0.3):
            left = sqrt_factor(pendulum_pot, 1, -1, y)
            right = sqrt_factor(pendulum_pot, 2, -1, y)
            assert left == pytest.approx(right, rel=1e-13)
            assert sqrt_factor(pendulum_pot, 2, -1, -y) == pytest.approx(left, rel=1e-13)

    def test_smooth_across_zero(self, twowell_pot):
        # values parametrized by signed y interpolate smoothly through 0
        ys = np.array([-3e-3, -2e-3, -1e-3, 1e-3, 2e-3, 3e-3])
        vals = np.array([sqrt_factor(twowell_pot, 2, -1, float(y)) for y in ys])
        fit = np.polyfit(ys, vals, 3)
        assert np.max(np.abs(np.polyval(fit, ys) - vals)) < 1e-11

    def test_continuity_at_zero(self, pendulum_pot):
        v0 = sqrt_factor(pendulum_pot, 2, -1, 0.0)
        v1 = sqrt_factor(pendulum_pot, 2, -1, 1e-7)
        assert abs(v1 - v0) <= 1e-6

    def test_too_close_to_separatrix(self, pendulum_pot):
        with pytest.raises(TooCloseToSeparatrix):
            sqrt_factor(pendulum_pot, 1, -1, 1.45)


class TestCosineLike:
    def test_exact_cosine(self, pendulum_pot):
        assert cosine_like_check(pendulum_pot, 1.0, 1.0, 1.0) is True

    def test_large_perturbation(self):
        pot = make_potential(cos=[-1.0], sin=[0.5], s0=1.0)
        assert cosine_like_check(pot, 1.0, 1.0, 1.0) is False

    def test_threshold_case(self):
        # the threshold underflows float64; half of it is representably zero,
        # so the constructible threshold potential is exactly -cos
        from morseactions.constants import cosine_like_threshold

        eps = cosine_like_threshold(1.0, 1.0, 1.0).value / 2.0
        pot = make_potential(cos=[-1.0], sin=[eps], s0=1.0)
        assert cosine_like_check(pot, 1.0, 1.0, 1.0) is True

    def test_implies_morse_with_stated_constants(self, pendulum_pot):
        eta = 1.0
        md = morse_check(pendulum_pot)
        assert md.beta >= eta / 4
        assert md.M <= eta * (0.25 + math.cosh(1.0))
        assert md.n_wells == 1
        # minimum within (-pi/6, pi/6), maximum within pi/6 of +-pi
        assert abs(md.crit_points[1]) < math.pi / 6
        assert math.pi - abs(md.crit_points[0]) < math.pi / 6
