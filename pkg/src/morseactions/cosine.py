"""Closed-form/high-precision reference for the -eta*cos potential.

Used as the ground-truth oracle in tests: the integrals are evaluated on
substitutions different from the generic pipeline (arcsine form in the well,
half-angle + sinh form in rotation) so a shared bug cannot mask itself.
All quadratures target 1e-13 relative accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EnergyOutOfRange
from .quadrature import gauss_legendre

TOL = 1e-13


@dataclass(frozen=True)
class CosineRef:
    """Reference data for F(theta) = -eta cos(theta), eta > 0."""

    eta: float = 1.0

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be positive")

    def _check(self, i, E):
        Eb = E / self.eta
        if i == 1:
            if not -1.0 < Eb < 1.0:
                raise EnergyOutOfRange(f"well energy must be in (-eta, eta), got {E}")
        elif i in (0, 2):
            if Eb <= 1.0:
                raise EnergyOutOfRange(f"rotational energy must exceed eta, got {E}")
        else:
            raise ValueError("region index must be 0, 1 or 2")
        return Eb

    # --- actions ---

    def action(self, i, E):
        """I^(i)(E) for the Hamiltonian p^2 - eta cos(theta)."""
        Eb = self._check(i, E)
        if i == 1:
            # y-substitution cos(theta) = (Eb+1) y^2 - Eb, then y = sin(phi)
            a, b = 1.0 - Eb, 1.0 + Eb
            c = 4.0 * math.sqrt(self.eta) * b / math.pi

            def f(phi):
                s2 = np.sin(phi) ** 2
                return s2 / np.sqrt(a + b * s2)

            if a >= 0.5:
                return c * gauss_legendre(f, 0.0, math.pi / 2, tol=TOL, n0=32)
            # peak at phi = 0 when E -> eta: sin(phi) = sqrt(a/b) sinh(s)
            phi0 = math.pi / 4
            S = math.asinh(math.sin(phi0) * math.sqrt(b / a))

            def g(s):
                sn2 = (a / b) * np.sinh(s) ** 2
                return (sn2 / math.sqrt(b)) / np.sqrt(1.0 - sn2)

            peak = gauss_legendre(g, 0.0, S, tol=TOL, n0=32)
            rest = gauss_legendre(f, phi0, math.pi / 2, tol=TOL, n0=32)
            return c * (peak + rest)
        # rotation: theta = pi - 2 phi gives Eb + cos(theta) = Eb - 1 + 2 sin^2(phi)
        c = 2.0 * math.sqrt(self.eta) / math.pi
        eb1 = Eb - 1.0

        def f(phi):
            return np.sqrt(eb1 + 2.0 * np.sin(phi) ** 2)

        val = c * gauss_legendre(f, 0.0, math.pi / 2, tol=TOL, n0=32)
        return val if i == 2 else -val

    def action_deriv(self, i, E, order=1):
        """d^order I^(i)/dE^order, order 1 or 2."""
        Eb = self._check(i, E)
        if order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        if i == 1:
            a, b = 1.0 - Eb, 1.0 + Eb
            if order == 1:
                c = 2.0 / (math.pi * math.sqrt(self.eta))

                def f(phi):
                    return 1.0 / np.sqrt(a + b * np.sin(phi) ** 2)

                def g(s):
                    sn2 = (a / b) * np.sinh(s) ** 2
                    return 1.0 / (math.sqrt(b) * np.sqrt(1.0 - sn2))
            else:
                c = 1.0 / (math.pi * self.eta ** 1.5)

                def f(phi):
                    return np.cos(phi) ** 2 / (a + b * np.sin(phi) ** 2) ** 1.5

                def g(s):
                    sn2 = (a / b) * np.sinh(s) ** 2
                    return np.sqrt(1.0 - sn2) / (a * math.sqrt(b) * np.cosh(s) ** 2)

            if a >= 0.5:
                return c * gauss_legendre(f, 0.0, math.pi / 2, tol=TOL, n0=32)
            phi0 = math.pi / 4
            S = math.asinh(math.sin(phi0) * math.sqrt(b / a))
            peak = gauss_legendre(g, 0.0, S, tol=TOL, n0=32)
            rest = gauss_legendre(f, phi0, math.pi / 2, tol=TOL, n0=32)
            return c * (peak + rest)
        sgn = 1.0 if i == 2 else -1.0
        eb1 = Eb - 1.0
        if order == 1:
            c = 1.0 / (math.pi * math.sqrt(self.eta))

            def f(phi):
                return 1.0 / np.sqrt(eb1 + 2.0 * np.sin(phi) ** 2)
        else:
            c = -1.0 / (2.0 * math.pi * self.eta ** 1.5)

            def f(phi):
                return 1.0 / (eb1 + 2.0 * np.sin(phi) ** 2) ** 1.5

        if eb1 >= 0.5:
            return sgn * c * gauss_legendre(f, 0.0, math.pi / 2, tol=TOL, n0=32)
        # near the separatrix, handle the peak at phi = 0 with
        # sin(phi) = sqrt(eb1/2) sinh(s) on [0, pi/4], plain rule beyond
        phi0 = math.pi / 4
        half = math.sqrt(eb1 / 2.0)
        S = math.asinh(math.sin(phi0) / half)
        if order == 1:
            def g(s):
                sn = half * np.sinh(s)
                return 1.0 / (math.sqrt(2.0) * np.sqrt(1.0 - sn * sn))
        else:
            def g(s):
                sn = half * np.sinh(s)
                return 1.0 / (eb1 * math.sqrt(2.0) * np.cosh(s) ** 2
                              * np.sqrt(1.0 - sn * sn))

        peak = gauss_legendre(g, 0.0, S, tol=TOL, n0=32)
        rest = gauss_legendre(f, phi0, math.pi / 2, tol=TOL, n0=32)
        return sgn * c * (peak + rest)

    # --- inversion and twist ---

    def domain(self, i):
        lim = math.sqrt(2.0 * self.eta)
        if i == 1:
            return 0.0, 4.0 * lim / math.pi
        if i == 2:
            return 2.0 * lim / math.pi, math.inf
        return -math.inf, -2.0 * lim / math.pi

    def energy(self, i, I):
        """E^(i)(I) by bracketed Newton on the reference action."""
        lo_a, hi_a = self.domain(i)
        if not lo_a < I < hi_a:
            raise EnergyOutOfRange(f"action {I} outside region {i} domain")
        eta = self.eta
        if i == 1:
            lo, hi = -eta * (1 - 1e-15), eta * (1 - 1e-15)
        else:
            lo = eta * (1 + 1e-15)
            hi = max(2.0 * eta, (abs(I) + math.sqrt(eta)) ** 2 + eta)
        sgn = -1.0 if i == 0 else 1.0    # sgn * I is increasing in E
        E = 0.5 * (lo + hi)
        for _ in range(200):
            f = sgn * (self.action(i, E) - I)
            if abs(f) <= 1e-13 * (1.0 + abs(I)):
                return E
            En = E - f / (sgn * self.action_deriv(i, E))
            if not lo < En < hi:
                En = 0.5 * (lo + hi)
            if sgn * (self.action(i, En) - I) > 0:
                hi = En
            else:
                lo = En
            E = En
        return E

    def twist(self, i, I):
        """d2E/dI2 at an action value: -I''(E) / I'(E)^3."""
        E = self.energy(i, I)
        d1 = self.action_deriv(i, E, 1)
        d2 = self.action_deriv(i, E, 2)
        if i == 0:
            d1 = -d1
            d2 = -d2
        return -d2 / d1 ** 3

    def twist_at_energy(self, i, E):
        d1 = self.action_deriv(i, E, 1)
        d2 = self.action_deriv(i, E, 2)
        if i == 0:
            d1, d2 = -d1, -d2
        return -d2 / d1 ** 3

    def rotational_twist_infimum(self, E_max=1e6, n=200):
        """Measured infimum of the rotational twist over I > 2 sqrt(2 eta)/pi.

        The infimum (approached as E -> infinity) is recorded, not asserted.
        """
        energies = self.eta * (1.0 + np.exp(np.linspace(math.log(1e-3), math.log(E_max), n)))
        vals = [self.twist_at_energy(2, float(E)) for E in energies]
        return float(min(vals))


def action_star(ref: CosineRef, i, E):
    return ref.action(i, E)


def action_star_derivs(ref: CosineRef, i, E, order=1):
    return ref.action_deriv(i, E, order)


def twist_star(ref: CosineRef, i, I):
    return ref.twist(i, I)
