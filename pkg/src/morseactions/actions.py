"""Spec-level operations over regions: actions, derivatives, identities, bounds.

Thin functional layer over OneDSystem; a small cache keys systems by
potential identity and parameter point so the functional API stays cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import cosine_like_threshold
from .errors import BoundViolated
from .potential import FourierPotential, sup_fourier_distance, TrigSeries
from .system import OneDSystem, RegionTable, build_region_table, pure_system

_CACHE = {}
_CACHE_MAX = 32


def get_system(pot, p_hat=None, R0=None, r0=1.0) -> OneDSystem:
    """Cached pure-potential system for the functional API."""
    key = (id(pot), tuple(np.atleast_1d(p_hat)) if p_hat is not None else None, R0, r0)
    sys_ = _CACHE.get(key)
    if sys_ is None:
        if len(_CACHE) >= _CACHE_MAX:
            _CACHE.clear()
        sys_ = pure_system(pot, p_hat, R0=R0, r0=r0)
        _CACHE[key] = sys_
    return sys_


def region_table(morse, cont, R0) -> RegionTable:
    """Windows and index bookkeeping of the 2N+1 phase-space regions."""
    return build_region_table(morse, cont, R0)


@dataclass(frozen=True)
class ActionBranch:
    """A region of one system, bound to its quadrature plan."""

    system: OneDSystem
    region: int

    @property
    def window(self):
        return self.system.window(self.region)

    def action(self, E):
        return self.system.action(self.region, E)

    def action_deriv(self, E, path="auto"):
        return self.system.action_deriv(self.region, E, path=path)

    def action_deriv2(self, E):
        return self.system.action_deriv2(self.region, E)


def action(branch: ActionBranch, E):
    return branch.action(E)


def action_deriv(branch: ActionBranch, E, path="auto"):
    return branch.action_deriv(E, path=path)


def branch_invert(pot, i, E, p_hat=None):
    """theta on monotone branch i with G(theta, p_hat) = E (translated coords)."""
    return get_system(pot, p_hat).branch_invert(i, E)


def sqrt_factor(pot, i, side, y, p_hat=None):
    """Sigma_{i,side}(y) of the branch square-root factorization."""
    return get_system(pot, p_hat).sqrt_factor(i, side, y)


def cosine_like_check(pot_G, eta, s0, r0, p_hat=None):
    """True iff the width-s0 coefficient distance to -eta*cos is within the
    cosine-like threshold (log-space comparison; the threshold underflows
    float64 at all practical parameters)."""
    minus_eta_cos = TrigSeries(np.array([-float(eta)]), np.array([0.0]))
    dist = sup_fourier_distance(pot_G.series_at(p_hat), minus_eta_cos, s0)
    thr = cosine_like_threshold(eta, s0, r0)
    if dist == 0.0:
        return True
    return math.log2(dist) <= thr.log2


def split_identities(system: OneDSystem, E, tol=1e-11):
    """Residuals of the split identities at energy E.

    Each well action is recomputed through the independent whole-well
    Gauss-Jacobi route and compared with the sum of its two branch halves;
    for rotational energies, twice the rotational action is compared with
    the sum of all full-well half integrals.
    """
    out = {"E": E, "wells": [], "rotational": None}
    for w in system.regions.oscillatory():
        if w.kind != "well" or not w.contains(E):
            continue
        v = E - w.E_lo
        heights = [system.branch_energy_window(k)[1] - system.branch_energy_window(k)[0]
                   for k in w.branches]
        if v >= 0.9 * min(heights):
            continue
        lhs = system.well_action_jacobi(w, E, tol=tol)
        parts = [system.branch_action(k, E) for k in w.branches]
        resid = abs(lhs - sum(parts))
        out["wells"].append({"region": w.index, "lhs": lhs, "minus_part": parts[0],
                             "plus_part": parts[1], "residual": resid,
                             "rel_residual": resid / (1.0 + abs(lhs))})
    w_rot = system.regions[2 * system.N]
    if w_rot.contains(E):
        lhs = 2.0 * system.action(2 * system.N, E)
        rhs = sum(system.branch_action(k, E) for k in range(1, 2 * system.N + 1))
        resid = abs(lhs - rhs)
        out["rotational"] = {"lhs": lhs, "rhs": rhs, "residual": resid,
                             "rel_residual": resid / (1.0 + abs(lhs))}
    return out


def barrier_split_report(system: OneDSystem, region, E, tol=1e-11):
    """Barrier-region split: full derivative vs per-branch components."""
    w = system.window(region)
    system._check_window(w, E)
    parts = [system.branch_action(k, E) for k in w.branches]
    total = system.action(region, E, tol=tol)
    resid = abs(total - sum(parts))
    return {"region": region, "E": E, "parts": parts, "total": total,
            "residual": resid, "rel_residual": resid / (1.0 + abs(total))}


def lower_bound_report(system: OneDSystem, n_grid=64, clip=1e-6, raise_on_fail=True):
    """Derivative floors of dI/dE on every region.

    Oscillatory regions must satisfy dI/dE >= sqrt(beta) s0^{3/2} / (64 M);
    rotational ones |dI/dE| >= 1/(4 sqrt(E + 3M/2)).  The minimum over a
    log-spaced energy grid (clipped ``clip`` from the window edges) is
    compared per region.
    """
    pc = system.pc
    floor = pc.lower_bound_oscillatory()
    rows = []
    ok_all = True
    for w in system.regions.windows:
        lo, hi = w.E_lo, w.E_hi
        if hi - lo <= 2 * clip:
            continue
        offs = np.exp(np.linspace(math.log(clip), math.log(hi - lo - clip), n_grid))
        energies = lo + offs
        vals = np.array([abs(system.action_deriv(w.index, float(E))) for E in energies])
        if w.kind in ("well", "barrier"):
            bound = np.full(n_grid, floor)
        else:
            bound = 1.0 / (4.0 * np.sqrt(energies + 1.5 * pc.M))
        ok = bool(np.all(vals >= bound))
        ok_all = ok_all and ok
        worst = int(np.argmin(vals - bound))
        rows.append({"region": w.index, "kind": w.kind, "passed": ok,
                     "min_deriv": float(np.min(vals)),
                     "bound_at_worst": float(bound[worst]),
                     "worst_E": float(energies[worst]),
                     "margin": float(np.min(vals - bound))})
        if not ok and raise_on_fail:
            raise BoundViolated("derivative-floor",
                                f"region {w.index} at E = {energies[worst]}")
    return {"floor_oscillatory": floor, "regions": rows, "passed": ok_all}


def monotonicity_check(system: OneDSystem, region, n_grid=32, clip=1e-6):
    """I strictly increasing in E (rot- region: -I increasing)."""
    w = system.window(region)
    offs = np.exp(np.linspace(math.log(clip), math.log(w.E_hi - w.E_lo - clip), n_grid))
    vals = np.array([system.action(region, float(w.E_lo + o)) for o in offs])
    sgn = -1.0 if w.kind == "rot-" else 1.0
    return bool(np.all(np.diff(sgn * vals) > 0))
