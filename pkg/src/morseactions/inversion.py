"""Energy from action: inversion of I^(i)(., p_hat) and its derivatives.

The action is strictly monotone on every region, so E(I) is computed by
bracketed Newton with a bisection fallback.  First and second derivatives
of E come from the chain-rule formulas in terms of dI/dE and d2I/dE2;
parameter derivatives use centered differences across rebuilt systems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ActionOutOfDomain, NewtonStalled
from .system import OneDSystem

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ActionDomain:
    """Open action interval of one region, clipped by a safety margin.

    The margin lam (energy units) keeps the inversion away from the window
    edges; the effective margin is floored at the float spacing of the
    edges, since the nominal default (a paper radius) underflows.
    """

    region: int
    lam: float
    a_minus: float
    a_plus: float
    E_minus: float
    E_plus: float

    def contains(self, I):
        return self.a_minus < I < self.a_plus


def action_domain(system: OneDSystem, region, lam=None):
    w = system.window(region)
    if lam is None:
        lam = system.pc.r4.value / 4.0
    lam_eff = max(lam, 64.0 * _EPS * (1.0 + abs(w.E_lo) + abs(w.E_hi)))
    E_lo = w.E_lo + lam_eff
    E_hi = w.E_hi - lam_eff
    if w.kind == "well":
        a_minus, a_plus = 0.0, system.action(region, E_hi)
        E_lo_dom = w.E_lo
    elif w.kind == "barrier":
        a_minus, a_plus = system.action(region, E_lo), system.action(region, E_hi)
        E_lo_dom = E_lo
    elif w.kind == "rot+":
        a_minus, a_plus = system.action(region, E_lo), system.action(region, w.E_hi - lam_eff)
        E_lo_dom = E_lo
    else:  # rot-: action negative and decreasing in E
        a_minus, a_plus = system.action(region, w.E_hi - lam_eff), system.action(region, E_lo)
        E_lo_dom = E_lo
    return ActionDomain(region=region, lam=lam_eff, a_minus=float(a_minus),
                        a_plus=float(a_plus), E_minus=float(E_lo_dom), E_plus=float(E_hi))


@dataclass
class EnergyMap:
    """Inverse of I^(region) on its clipped action domain."""

    system: OneDSystem
    region: int
    lam: float = None
    tol: float = 1e-12
    domain: ActionDomain = field(init=False)

    def __post_init__(self):
        self.domain = action_domain(self.system, self.region, self.lam)
        self._sign = -1.0 if self.system.window(self.region).kind == "rot-" else 1.0

    def invert(self, I):
        """E with I^(region)(E) = I, bracketed Newton + bisection fallback."""
        dom = self.domain
        if not dom.contains(I):
            raise ActionOutOfDomain(
                f"region {self.region}: I = {I} outside ({dom.a_minus}, {dom.a_plus})")
        sys_ = self.system
        w = sys_.window(self.region)
        lo = max(dom.E_minus, w.E_lo + 64.0 * _EPS * (1.0 + abs(w.E_lo)))
        hi = dom.E_plus
        sgn = self._sign
        width = hi - lo
        E = 0.5 * (lo + hi)
        f = sgn * (sys_.action(self.region, E) - I)
        for _ in range(100):
            if abs(f) <= self.tol * (1.0 + abs(I)):
                return E
            d = sgn * sys_.action_deriv(self.region, E)
            step = f / d
            step = math.copysign(min(abs(step), 0.5 * width), step)
            En = E - step
            if not lo < En < hi:
                En = 0.5 * (lo + hi)
            fn = sgn * (sys_.action(self.region, En) - I)
            if fn > 0:
                hi = En
            else:
                lo = En
            E, f = En, fn
            width = hi - lo
        # bisection fallback
        for _ in range(200):
            E = 0.5 * (lo + hi)
            f = sgn * (sys_.action(self.region, E) - I)
            if abs(f) <= self.tol * (1.0 + abs(I)) or hi - lo < 4 * _EPS * (1 + abs(E)):
                return E
            if f > 0:
                hi = E
            else:
                lo = E
        raise NewtonStalled(f"inversion stalled at I = {I} in region {self.region}")


def invert(emap: EnergyMap, I):
    return emap.invert(I)


def energy_derivs_at_energy(system: OneDSystem, region, E):
    """(dE/dI, d2E/dI2) at a given region energy from the chain rule."""
    d1 = system.action_deriv(region, E)
    d2 = system.action_deriv2(region, E)
    return 1.0 / d1, -d2 / d1 ** 3


def twist_at_energy(system: OneDSystem, region, E):
    """d2E/dI2 at a region energy."""
    return energy_derivs_at_energy(system, region, E)[1]


def twist(emap: EnergyMap, I):
    """d2E/dI2 at an action value."""
    E = emap.invert(I)
    return twist_at_energy(emap.system, emap.region, E)


def energy_derivs(emap: EnergyMap, I, system_factory=None, p_hat=None, r0=None,
                  fd_scale=1e-5):
    """Derivatives of E^(region) at an action value.

    Returns a dict with dE_dI, d2E_dI2 and, when system_factory(p_hat_j)
    is provided (rebuilding the system at shifted parameter points), the
    parameter derivatives dE_dp, d2E_dIdp, d2E_dp2 by centered differences
    of the action at fixed E (chain-rule formulas).
    """
    sys_ = emap.system
    region = emap.region
    E = emap.invert(I)
    d1 = sys_.action_deriv(region, E)
    d2 = sys_.action_deriv2(region, E)
    out = {"E": E, "dE_dI": 1.0 / d1, "d2E_dI2": -d2 / d1 ** 3,
           "dI_dE": d1, "d2I_dE2": d2}
    if system_factory is None or p_hat is None:
        return out
    p = np.atleast_1d(np.asarray(p_hat, dtype=float))
    r0 = r0 if r0 is not None else sys_.r0
    h = fd_scale * r0
    dI_dp = np.zeros(p.size)
    d2I_dp2 = np.zeros(p.size)
    d2I_dEdp = np.zeros(p.size)
    for j in range(p.size):
        pp, pm = p.copy(), p.copy()
        pp[j] += h
        pm[j] -= h
        sp = system_factory(pp)
        sm = system_factory(pm)
        Ip, Im = sp.action(region, E), sm.action(region, E)
        I0 = sys_.action(region, E)
        dI_dp[j] = (Ip - Im) / (2 * h)
        d2I_dp2[j] = (Ip - 2 * I0 + Im) / h ** 2
        dp_, dm_ = sp.action_deriv(region, E), sm.action_deriv(region, E)
        d2I_dEdp[j] = (dp_ - dm_) / (2 * h)
    out["dE_dp"] = (-dI_dp / d1).tolist()
    out["d2E_dIdp"] = (d2 * dI_dp / d1 ** 3 - d2I_dEdp / d1 ** 2).tolist()
    out["d2E_dp2"] = (-d2I_dp2 / d1 + 2 * d2I_dEdp * dI_dp / d1 ** 2
                      - d2 * dI_dp ** 2 / d1 ** 3).tolist()
    return out
