"""Universal structure of dI/dE near critical energies.

At a separatrix approach the derivative of the action behaves like
phi(z) + psi(z) ln(1/z) with phi, psi analytic in z = |E - E_crit| / M;
fit_log_singularity extracts phi(0), psi(0) by least squares on a dyadic
z-grid.  At well bottoms the derivative is analytic and the same grid must
fit a cubic polynomial with no detectable log component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AnalyticityViolated, IllConditioned, WindowTooSmall
from .system import OneDSystem

K_FIT = 12
MIN_POINTS = 6


@dataclass(frozen=True)
class SingularityFit:
    """Result of a log-singularity fit at one window edge.

    psi0 is the coefficient of ln(1/z) (positive when dI/dE diverges toward
    the critical energy); model: phi0 + psi0 ln(1/z) + c2 z + c3 z ln(1/z).
    The classical floors s0/(32 sqrt M) and s0/(4 sqrt M) bound the
    period-form coefficient 2 pi psi0 (the decomposition of 2 pi dI/dE,
    where psi(0) = (1 + btilde) sqrt(2/|G''|) at the maximum); psi_floor
    stores the corresponding bound for the fitted psi0, i.e. floor / 2 pi.
    """

    region: int
    side: str                # "minus": upper edge from below; "plus": lower edge from above
    phi0: float
    psi0: float
    c_z: float
    c_zlog: float
    residual: float
    z_grid: np.ndarray
    values: np.ndarray
    r2_paper_log2: float     # log2 of the quoted analyticity radius for this edge kind
    psi_floor: float         # lower bound for |psi0| (0 at bottoms)
    psi_floor_period: float  # same floor for 2 pi psi0 (the quoted constant)

    @property
    def psi0_period(self):
        return 2.0 * math.pi * self.psi0

    def as_dict(self):
        return {"region": self.region, "side": self.side, "phi0": self.phi0,
                "psi0": self.psi0, "psi0_period": self.psi0_period,
                "c_z": self.c_z, "c_zlog": self.c_zlog,
                "residual": self.residual, "psi_floor": self.psi_floor,
                "psi_floor_period": self.psi_floor_period,
                "log2_r_paper": self.r2_paper_log2,
                "z_grid": self.z_grid.tolist(), "values": self.values.tolist()}


def _fit_grid(system, region, side, z0=None, k_fit=K_FIT):
    w = system.window(region)
    M = system.morse.M
    width = w.E_hi - w.E_lo
    if z0 is None:
        z0 = 0.5 * min(2e-3, 0.02 * width / M)
    z = z0 * 2.0 ** (-np.arange(k_fit + 1, dtype=float))
    if side == "minus":
        energies = w.E_hi - M * z
    else:
        energies = w.E_lo + M * z
    usable = np.array([w.contains(E) and (E != w.E_lo) and (E != w.E_hi) for E in energies])
    if np.sum(usable) < MIN_POINTS:
        raise WindowTooSmall(f"only {int(np.sum(usable))} sample energies fit in region {region}")
    return z[usable], energies[usable]


def _sample(system: OneDSystem, region, side, energies):
    w = system.window(region)
    if w.kind in ("rot+", "rot-"):
        # the log coefficient floor applies to the pair of half-well
        # integrals flanking the global maximum (equals 2 dI/dE when the
        # two momentum branches mirror)
        return np.array([system.flank_pair_deriv(2 * system.N, float(E)) for E in energies])
    if w.kind == "barrier":
        return np.array([system.flank_pair_deriv(w.index, float(E)) for E in energies])
    return np.array([system.action_deriv(region, float(E)) for E in energies])


def fit_log_singularity(system: OneDSystem, region, side, z0=None, k_fit=K_FIT):
    """Least-squares decomposition of dI/dE at a window edge.

    side "minus" approaches the upper window edge from below (the maximum
    side of a well); side "plus" approaches the lower edge from above (the
    well bottom for odd regions, the barrier top for even and rotational
    ones).  For even/rotational regions the sampled quantity is the
    flanking-pair derivative sum, whose psi floor is s0/(4 sqrt(M)).
    """
    w = system.window(region)
    if w.kind == "well" and side not in ("minus", "plus"):
        raise ValueError("side must be 'minus' or 'plus'")
    if w.kind != "well" and side != "plus":
        raise ValueError(f"region {region} ({w.kind}) only has a 'plus' side fit")
    z, energies = _fit_grid(system, region, side, z0=z0, k_fit=k_fit)
    vals = _sample(system, region, side, energies)

    lg = np.log(1.0 / z)
    A = np.column_stack([np.ones_like(z), lg, z, z * lg])
    scale = np.linalg.norm(A, axis=0)
    cond = np.linalg.cond(A / scale)
    if cond > 1e12:
        raise IllConditioned(f"design matrix condition {cond:.3e}")
    coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
    resid = float(np.max(np.abs(A @ coef - vals)))

    pc = system.pc
    if w.kind == "well":
        floor_period = pc.psi_floor_oscillatory() if side == "minus" else 0.0
        r_log2 = pc.r2.log2
    else:
        floor_period = pc.psi_floor_rotational()
        r_log2 = pc.r3.log2
    return SingularityFit(region=region, side=side,
                          phi0=float(coef[0]), psi0=float(coef[1]),
                          c_z=float(coef[2]), c_zlog=float(coef[3]),
                          residual=resid, z_grid=z, values=vals,
                          r2_paper_log2=r_log2,
                          psi_floor=floor_period / (2.0 * math.pi),
                          psi_floor_period=floor_period)


def two_scale_psi(system: OneDSystem, region, side, z=1e-5):
    """Model-free log coefficient estimate (f(z/2) - f(z)) / ln 2."""
    w = system.window(region)
    M = system.morse.M
    if side == "minus":
        energies = [w.E_hi - M * z, w.E_hi - M * z / 2]
    else:
        energies = [w.E_lo + M * z, w.E_lo + M * z / 2]
    f1, f2 = _sample(system, region, side, np.asarray(energies))
    return float((f2 - f1) / math.log(2.0))


def bottom_analyticity_check(system: OneDSystem, j, z0=None, k_fit=K_FIT,
                             poly_resid_tol=1e-7, raise_on_fail=True):
    """dI/dE is analytic at the bottom of well j: cubic fit, no log term.

    Also verifies the derivative bound |dI/dE| <= 16 sqrt(M) / (s0 beta) on
    the sample grid.
    """
    region = 2 * j - 1
    z, energies = _fit_grid(system, region, "plus", z0=z0, k_fit=k_fit)
    vals = np.array([system.action_deriv(region, float(E)) for E in energies])
    zeta = energies - system.window(region).E_lo
    A = np.column_stack([zeta ** k for k in range(4)])
    coef, *_ = np.linalg.lstsq(A / np.linalg.norm(A, axis=0), vals, rcond=None)
    coef = coef / np.linalg.norm(A, axis=0)
    poly_resid = float(np.max(np.abs(A @ coef - vals)))

    bound = system.pc.bottom_deriv_bound()
    deriv_ok = bool(np.all(np.abs(vals) <= bound))
    ok = poly_resid <= poly_resid_tol and deriv_ok
    report = {"well": j, "poly_residual": poly_resid, "poly_resid_tol": poly_resid_tol,
              "deriv_bound": bound, "max_deriv": float(np.max(np.abs(vals))),
              "deriv_bound_ok": deriv_ok, "bottom_value": float(vals[-1]),
              "coefficients": coef.tolist(), "passed": ok}
    if raise_on_fail and not ok:
        raise AnalyticityViolated(f"well {j}: poly residual {poly_resid:.3e}, "
                                  f"deriv bound ok = {deriv_ok}")
    return report


def perturbation_scaling(base_system_factory, eta_list, energies, region=1,
                         ratio_band=(0.4, 0.6)):
    """Linear-in-eta response of dI/dE away from critical energies.

    base_system_factory(eta) must return a OneDSystem for the potential
    perturbed with size eta (eta = 0 gives the unperturbed one).  Reports
    D(eta) = sup over the energy set of |dI_eta - dI_0| and the halving
    ratios D(eta/2)/D(eta).
    """
    sys0 = base_system_factory(0.0)
    base_vals = np.array([sys0.action_deriv(region, float(E)) for E in energies])

    def D(eta):
        s = base_system_factory(eta)
        vals = np.array([s.action_deriv(region, float(E)) for E in energies])
        return float(np.max(np.abs(vals - base_vals)))

    rows = []
    for eta in eta_list:
        d1 = D(eta)
        d2 = D(eta / 2.0)
        ratio = d2 / d1 if d1 > 0 else math.nan
        rows.append({"eta": eta, "D": d1, "D_half": d2, "ratio": ratio,
                     "ratio_ok": bool(ratio_band[0] <= ratio <= ratio_band[1]) if d1 > 0 else eta == 0})
    return {"region": region, "energies": list(map(float, energies)), "rows": rows,
            "passed": all(r["ratio_ok"] for r in rows)}
