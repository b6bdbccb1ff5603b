import math

import numpy as np
import pytest

from morseactions.cosine import CosineRef
from morseactions.errors import EnergyOutOfRange
from morseactions.potential import pendulum_potential
from morseactions.system import pure_system


class TestReferenceValues:
    def test_domain_endpoints(self, cosine_ref):
        assert cosine_ref.action(1, 1 - 1e-12) == pytest.approx(
            4 * math.sqrt(2) / math.pi, rel=1e-10)
        assert cosine_ref.action(2, 1 + 1e-12) == pytest.approx(
            2 * math.sqrt(2) / math.pi, rel=1e-10)

    def test_antisymmetry(self, cosine_ref):
        for E in (1.3, 4.0):
            assert cosine_ref.action(0, E) == -cosine_ref.action(2, E)

    def test_midwell_value_against_quadrature(self, cosine_ref):
        from scipy.integrate import quad

        val, err = quad(lambda t: math.sqrt(max(math.cos(t), 0.0)),
                        0, math.pi / 2, epsabs=1e-13, epsrel=1e-13)
        assert cosine_ref.action(1, 0.0) == pytest.approx(2 * val / math.pi, rel=1e-11)

    def test_bottom_limits(self, cosine_ref):
        assert cosine_ref.action_deriv(1, -1 + 1e-8) == pytest.approx(
            1 / math.sqrt(2), abs=1e-4)
        assert cosine_ref.action_deriv(1, -1 + 1e-8, 2) == pytest.approx(
            1 / (8 * math.sqrt(2)), abs=1e-4)

    def test_derivative_positivity(self, cosine_ref):
        for E in np.linspace(-0.95, 0.95, 11):
            assert cosine_ref.action_deriv(1, float(E)) > 0
            assert cosine_ref.action_deriv(1, float(E), 2) > 0

    def test_well_first_derivative_increasing(self, cosine_ref):
        Es = np.linspace(-0.99, 0.99, 21)
        ds = [cosine_ref.action_deriv(1, float(E)) for E in Es]
        assert np.all(np.diff(ds) > 0)
        assert min(ds) >= 1 / math.sqrt(2)

    def test_rotational_bounds(self, cosine_ref):
        for E in (2.0, 3.5, 10.0):
            assert cosine_ref.action_deriv(2, E) <= 1 / math.sqrt(2 * E)
            assert -cosine_ref.action_deriv(2, E, 2) >= 1 / (8 * math.sqrt(2) * E ** 1.5)

    def test_eta_scaling(self):
        ref = CosineRef(0.7)
        assert ref.action(1, 0.7 * (1 - 1e-12)) == pytest.approx(
            4 * math.sqrt(2 * 0.7) / math.pi, rel=1e-9)
        assert ref.action_deriv(1, -0.7 + 1e-9) == pytest.approx(
            1 / math.sqrt(2 * 0.7), rel=1e-4)

    def test_energy_out_of_range(self, cosine_ref):
        with pytest.raises(EnergyOutOfRange):
            cosine_ref.action(1, 1.5)
        with pytest.raises(EnergyOutOfRange):
            cosine_ref.action(2, 0.5)


class TestTwistStar:
    def test_bottom_limit(self, cosine_ref):
        assert cosine_ref.twist(1, 1e-4) == pytest.approx(-0.25, abs=1e-3)

    def test_rotational_limit(self, cosine_ref):
        assert cosine_ref.twist_at_energy(2, 1e5) == pytest.approx(2.0, abs=1e-4)

    def test_midwell_composition(self, cosine_ref):
        I = cosine_ref.action(1, 0.0)
        assert cosine_ref.energy(1, I) == pytest.approx(0.0, abs=1e-11)
        tw = cosine_ref.twist(1, I)
        d1 = cosine_ref.action_deriv(1, 0.0)
        d2 = cosine_ref.action_deriv(1, 0.0, 2)
        assert tw == pytest.approx(-d2 / d1 ** 3, rel=1e-10)

    def test_c_star_star_measured(self, cosine_ref):
        # the rotational twist infimum is measured and recorded (~2,
        # approached at large energy); it is positive
        c = cosine_ref.rotational_twist_infimum(1e6, 40)
        assert c == pytest.approx(2.0, abs=1e-6)
        assert c > 0


class TestPipelineAgreement:
    def test_oracle_agreement_all_regions(self, pendulum, cosine_ref):
        grids = {
            1: np.linspace(-0.995, 0.995, 50),
            2: 1.0 + np.exp(np.linspace(math.log(1e-3), math.log(40.0), 50)),
            0: 1.0 + np.exp(np.linspace(math.log(1e-3), math.log(40.0), 50)),
        }
        for region, Es in grids.items():
            for E in Es:
                E = float(E)
                assert pendulum.action(region, E) == pytest.approx(
                    cosine_ref.action(region, E), rel=1e-8)
                assert pendulum.action_deriv(region, E) == pytest.approx(
                    cosine_ref.action_deriv(region, E), rel=1e-8)

    def test_agreement_other_eta(self):
        eta = 0.7
        ref = CosineRef(eta)
        system = pure_system(pendulum_potential(eta=eta), R0=25.0)
        for E in np.linspace(-0.69, 0.69, 25):
            assert system.action(1, float(E)) == pytest.approx(
                ref.action(1, float(E)), rel=1e-8)

    def test_twist_agreement(self, pendulum, cosine_ref):
        for E in np.linspace(-0.9, 0.9, 9):
            a = pendulum.twist_at_energy(1, float(E))
            b = cosine_ref.twist_at_energy(1, float(E))
            assert a == pytest.approx(b, rel=1e-3)
