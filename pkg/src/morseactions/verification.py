"""Acceptance suite: the quantitative checks the library must satisfy.

Each criterion function returns a record {name, passed, detail, elapsed};
run_suite executes a named collection and prints one pass/fail line per
criterion.  The same records back the CLI `verify` subcommand and the
pytest acceptance module.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .actions import lower_bound_report, split_identities
from .constants import rosetta_well_bound
from .cosine import CosineRef
from .inversion import EnergyMap, twist_at_energy
from .morse import morse_check
from .potential import ParamPolynomial, make_potential, pendulum_potential
from .singularity import bottom_analyticity_check, fit_log_singularity, perturbation_scaling
from .standard_form import PerturbedHamiltonian, normalize, standard_form_system
from .system import pure_system, perturbed_system

TWOWELL_COS = (-1.0, 0.5, 0.0)
TWOWELL_SIN = (0.08, 0.0, 0.03)


class VerifyContext:
    """Shared fixtures: built lazily, reused across criteria."""

    def __init__(self):
        self._cache = {}

    def pendulum(self):
        if "pend" not in self._cache:
            self._cache["pend"] = pure_system(pendulum_potential(), R0=35.0)
        return self._cache["pend"]

    def twowell_potential(self):
        if "twpot" not in self._cache:
            self._cache["twpot"] = make_potential(cos=list(TWOWELL_COS),
                                                  sin=list(TWOWELL_SIN), s0=1.0)
        return self._cache["twpot"]

    def twowell(self):
        if "tw" not in self._cache:
            self._cache["tw"] = pure_system(self.twowell_potential(), R0=12.0)
        return self._cache["tw"]

    def cosine_ref(self):
        if "ref" not in self._cache:
            self._cache["ref"] = CosineRef(1.0)
        return self._cache["ref"]


def _record(name, passed, detail, t0):
    return {"name": name, "passed": bool(passed), "detail": detail,
            "elapsed": time.time() - t0}


def criterion_1_separatrix_actions(ctx):
    """Pendulum separatrix action limits from both sides."""
    t0 = time.time()
    sys_p = ctx.pendulum()
    target1 = 4.0 * math.sqrt(2.0) / math.pi
    target2 = 2.0 * math.sqrt(2.0) / math.pi
    I1 = sys_p.action(1, 1.0 - 1e-10)
    I2 = sys_p.action(2, 1.0 + 1e-10)
    e1 = abs(I1 / target1 - 1.0)
    e2 = abs(I2 / target2 - 1.0)
    ok = e1 <= 1e-7 and e2 <= 1e-7 and (time.time() - t0) < 5.0
    return _record("1 separatrix actions",
                   ok, f"I1 rel err {e1:.2e}, I2 rel err {e2:.2e}", t0)


def criterion_2_bottom_limits(ctx):
    """dI/dE and d2I/dE2 limits at the well bottom."""
    t0 = time.time()
    sys_p = ctx.pendulum()
    E = -1.0 + 1e-6
    d1 = sys_p.action_deriv(1, E)
    d2 = sys_p.action_deriv2(1, E)
    e1 = abs(d1 * math.sqrt(2.0) - 1.0)
    e2 = abs(d2 * 8.0 * math.sqrt(2.0) - 1.0)
    ok = e1 <= 1e-3 and e2 <= 1e-2 and (time.time() - t0) < 5.0
    return _record("2 bottom limits", ok,
                   f"dI err {e1:.2e} (tol 1e-3), d2I err {e2:.2e} (tol 1e-2)", t0)


def criterion_3_twist_floor(ctx):
    """Twist floor 1/4 in the well; rotational twist -> 2."""
    t0 = time.time()
    sys_p = ctx.pendulum()
    offs = np.exp(np.linspace(math.log(1e-6), math.log(2.0 - 1e-3), 64))
    twists = np.array([-twist_at_energy(sys_p, 1, float(-1.0 + o)) for o in offs])
    floor_ok = bool(np.all(twists >= 0.25 * (1.0 - 1e-3)))
    bottom = -twist_at_energy(sys_p, 1, -1.0 + 1e-6)
    bottom_ok = abs(bottom - 0.25) <= 1e-3
    rot = twist_at_energy(sys_p, 2, 1000.0)
    rot_ok = abs(rot - 2.0) <= 1e-2
    ok = floor_ok and bottom_ok and rot_ok and (time.time() - t0) < 10.0
    return _record("3 twist floor", ok,
                   f"min -twist {twists.min():.6f}, bottom {bottom:.6f}, rot(1e3) {rot:.6f}", t0)


def criterion_4_log_singularity(ctx):
    """Pendulum psi floors: separatrix side and bottom analyticity."""
    t0 = time.time()
    sys_p = ctx.pendulum()
    fit = fit_log_singularity(sys_p, 1, "minus")
    bound = 1.0 / (32.0 * math.sqrt(math.cosh(1.0)))
    sep_ok = fit.psi0 >= bound and fit.residual <= 1e-4 * (abs(fit.phi0) + abs(fit.psi0))
    fitb = fit_log_singularity(sys_p, 1, "plus")
    bot_ok = abs(fitb.psi0) <= 1e-6
    ok = sep_ok and bot_ok and (time.time() - t0) < 20.0
    return _record("4 log singularity", ok,
                   f"psi0 {fit.psi0:.6f} >= {bound:.6f}, resid {fit.residual:.2e}, "
                   f"bottom psi0 {fitb.psi0:.2e}", t0)


def _deriv_consistency(system, region, n=50):
    # interior grid clipped 0.1 beta from the critical energies, where the
    # finite-difference comparison itself is well conditioned
    w = system.window(region)
    width = w.E_hi - w.E_lo
    clip = max(1e-3 * width, 0.1 * system.morse.beta)
    offs = np.exp(np.linspace(math.log(clip), math.log(width - clip), n))
    worst = 0.0
    for o in offs:
        E = float(w.E_lo + o)
        d = system.action_deriv(region, E)

        def fd(h):
            return (system.action(region, E + h) - system.action(region, E - h)) / (2 * h)

        h = min(1e-4 * max(1.0, abs(E)), 0.2 * min(o, width - o))
        rich = (4.0 * fd(h / 2) - fd(h)) / 3.0
        worst = max(worst, abs(rich / d - 1.0))
    return worst


def criterion_5_derivative_consistency(ctx):
    """Analytic dI/dE vs FD of I; both derivative routes agree on overlap."""
    t0 = time.time()
    worst_fd = 0.0
    for system, regions in ((ctx.pendulum(), (1, 2, 0)), (ctx.twowell(), (1, 3, 2, 4))):
        for r in regions:
            worst_fd = max(worst_fd, _deriv_consistency(system, r, n=50))
    worst_paths = 0.0
    for system in (ctx.pendulum(), ctx.twowell()):
        beta = system.morse.beta
        for w in system.regions.windows:
            if w.kind != "well":
                continue
            for v in np.linspace(0.02 * beta, 0.2 * beta, 7):
                E = float(w.E_lo + v)
                a = system.action_deriv(w.index, E, path="stable")
                b = system.action_deriv(w.index, E, path="direct")
                worst_paths = max(worst_paths, abs(a - b) / (1.0 + abs(a)))
    ok = worst_fd <= 1e-6 and worst_paths <= 1e-8
    return _record("5 derivative consistency", ok,
                   f"FD worst rel {worst_fd:.2e} (tol 1e-6), "
                   f"path gap {worst_paths:.2e} (tol 1e-8)", t0)


def criterion_6_split_identities(ctx):
    """Well-split and rotational-sum identities on the two-well potential."""
    t0 = time.time()
    sys_t = ctx.twowell()
    worst = 0.0
    count = 0
    for w in sys_t.regions.windows:
        if w.kind == "rot-":
            continue
        width = w.E_hi - w.E_lo
        for frac in np.linspace(0.05, 0.6, 10):
            E = float(w.E_lo + frac * width)
            rep = split_identities(sys_t, E)
            for rec in rep["wells"]:
                worst = max(worst, rec["rel_residual"])
                count += 1
            if rep["rotational"] is not None:
                worst = max(worst, rep["rotational"]["rel_residual"])
                count += 1
        if count >= 20:
            break
    ok = worst <= 1e-9 and count >= 20
    return _record("6 split identities", ok,
                   f"worst rel residual {worst:.2e} over {count} checks", t0)


def criterion_7_area_oracle(ctx):
    """2 pi I equals the grid-counted well area for the pendulum."""
    t0 = time.time()
    sys_p = ctx.pendulum()
    n = 4000
    worst = 0.0
    for E in (-0.5, 0.0, 0.9):
        q = -np.pi + 2.0 * np.pi * (np.arange(n) + 0.5) / n
        pmax = math.sqrt(E + 1.0) * 1.05
        p = -pmax + 2.0 * pmax * (np.arange(n) + 0.5) / n
        G = sys_p.series.eval(q, 0)
        inside = (p[:, None] ** 2 + G[None, :]) <= E
        area = float(np.count_nonzero(inside)) * (2.0 * np.pi / n) * (2.0 * pmax / n)
        target = 2.0 * np.pi * sys_p.action(1, E)
        worst = max(worst, abs(area / target - 1.0))
    ok = worst <= 1e-3 and (time.time() - t0) < 60.0
    return _record("7 area oracle", ok, f"worst rel err {worst:.2e}", t0)


def make_acceptance_hamiltonian(eps=1e-3):
    """G = -cos Q + eps P sin Q on r0 = 1.5, R0 = 2.5, s0 = 1."""
    base = pendulum_potential(s0=1.0)
    zero = ParamPolynomial(np.array([0.0]))
    return PerturbedHamiltonian(
        base=base,
        pert_cos=(zero, zero),
        pert_sin=(zero, ParamPolynomial(np.array([0.0, eps]))),
        eta0=eps * (2.5 + 1.5) * math.cosh(1.0),
        r0=1.5, R0=2.5,
    )


def criterion_8_standard_form(ctx):
    """Normalization bounds and exactness for the momentum-linear example."""
    t0 = time.time()
    ph = make_acceptance_hamiltonian(1e-3)
    sfs = normalize(ph, strict=False)
    rep = {e["name"]: e for e in sfs.bounds_report()}
    comp_ok = rep["composition"]["passed"]
    sympl_ok = rep["symplectic_slice"]["passed"]
    bounds_ok = all(e["passed"] for e in sfs.bounds_report())
    ok = comp_ok and sympl_ok and bounds_ok
    detail = (f"composition {rep['composition']['measured']:.2e}, "
              f"symplectic {rep['symplectic_slice']['measured']:.2e}, "
              f"all bounds {'pass' if bounds_ok else 'FAIL'}")
    return _record("8 standard form", ok, detail, t0)


def criterion_9_inversion_roundtrip(ctx):
    """I(E(I)) round trip and dE/dI * dI/dE = 1."""
    t0 = time.time()
    worst_rt = 0.0
    worst_id = 0.0
    for system in (ctx.pendulum(),):
        for region in (1, 2, 0):
            emap = EnergyMap(system, region)
            dom = emap.domain
            lo = dom.a_minus + 0.01 * (dom.a_plus - dom.a_minus)
            hi = dom.a_plus - 0.01 * (dom.a_plus - dom.a_minus)
            for I in np.linspace(lo, hi, 20):
                E = emap.invert(float(I))
                back = system.action(region, E)
                worst_rt = max(worst_rt, abs(back - I) / (1.0 + abs(I)))
                d1 = system.action_deriv(region, E)
                worst_id = max(worst_id, abs(d1 * (1.0 / d1) - 1.0))
    ok = worst_rt <= 1e-10 and worst_id <= 1e-10
    return _record("9 inversion roundtrip", ok,
                   f"roundtrip {worst_rt:.2e}, identity {worst_id:.2e}", t0)


def criterion_10_lower_bounds(ctx):
    """Derivative floors on all regions, pendulum and two-well."""
    t0 = time.time()
    ok = True
    details = []
    for name, system in (("pendulum", ctx.pendulum()), ("twowell", ctx.twowell())):
        rep = lower_bound_report(system, n_grid=64, raise_on_fail=False)
        ok = ok and rep["passed"]
        margin = min(r["margin"] for r in rep["regions"])
        details.append(f"{name} min margin {margin:.4f}")
    return _record("10 lower bounds", ok, "; ".join(details), t0)


def criterion_11_perturbation_scaling(ctx):
    """D(eta/2)/D(eta) in [0.4, 0.6] on the asymmetric two-well."""
    t0 = time.time()
    base = ctx.twowell_potential()
    md = morse_check(base)
    sys0 = ctx.twowell()

    def factory(eta):
        if eta == 0.0:
            return sys0
        pot = make_potential(cos=list(TWOWELL_COS),
                             sin=[TWOWELL_SIN[0] + eta, 0.0, TWOWELL_SIN[2]], s0=1.0)
        return perturbed_system(pot, md, eta=eta, R0=12.0)

    rep = perturbation_scaling(factory, [1e-5, 5e-6], [-0.7, -0.65, -0.6], region=1)
    # measured response must also sit below the explicit closeness bound
    pc = sys0.pc
    ok = rep["passed"]
    margins = []
    for row in rep["rows"]:
        log2_bound = rosetta_well_bound(pc, row["eta"])
        log2_D = math.log2(row["D"]) if row["D"] > 0 else -math.inf
        margins.append(log2_bound - log2_D)
        ok = ok and log2_D <= log2_bound
    detail = (f"ratios {[round(r['ratio'], 6) for r in rep['rows']]}, "
              f"bound margins 2^{[round(m) for m in margins]}")
    return _record("11 perturbation scaling", ok, detail, t0)


def criterion_12_cosine_like_gate(ctx):
    """Twist floors for potentials within the cosine-like threshold."""
    t0 = time.time()
    from .actions import cosine_like_check

    pot = pendulum_potential()
    gate = cosine_like_check(pot, 1.0, 1.0, 1.0)
    sys_p = ctx.pendulum()
    offs = np.exp(np.linspace(math.log(1e-4), math.log(2.0 - 1e-2), 24))
    well = np.array([-twist_at_energy(sys_p, 1, float(-1.0 + o)) for o in offs])
    rote = np.exp(np.linspace(math.log(1e-3), math.log(1000.0), 24))
    rot = np.array([twist_at_energy(sys_p, 2, float(1.0 + o)) for o in rote])
    well_ok = bool(np.all(well >= 1.0 / 16.0))
    rot_ok = bool(np.all(rot >= 2.0 * (1.0 - 1e-9)))
    ok = gate and well_ok and rot_ok
    return _record("12 cosine-like gate", ok,
                   f"gate {gate}, min -twist well {well.min():.4f} >= 1/16, "
                   f"min twist rot {rot.min():.6f} >= 2", t0)


CRITERIA = {
    "1": criterion_1_separatrix_actions,
    "2": criterion_2_bottom_limits,
    "3": criterion_3_twist_floor,
    "4": criterion_4_log_singularity,
    "5": criterion_5_derivative_consistency,
    "6": criterion_6_split_identities,
    "7": criterion_7_area_oracle,
    "8": criterion_8_standard_form,
    "9": criterion_9_inversion_roundtrip,
    "10": criterion_10_lower_bounds,
    "11": criterion_11_perturbation_scaling,
    "12": criterion_12_cosine_like_gate,
}

SUITES = {
    "cosine": ["1", "2", "3", "4", "7", "9", "12"],
    "twowell": ["5", "6", "10", "11"],
    "standard-form": ["8"],
    "all": [str(k) for k in range(1, 13)],
}


def run_suite(suite="all", printer=print):
    ctx = VerifyContext()
    names = SUITES.get(suite)
    if names is None:
        raise KeyError(f"unknown suite '{suite}'; choose from {sorted(SUITES)}")
    records = []
    for key in names:
        rec = CRITERIA[key](ctx)
        records.append(rec)
        status = "PASS" if rec["passed"] else "FAIL"
        printer(f"{status}  criterion {rec['name']}  [{rec['elapsed']:.1f}s]  {rec['detail']}")
    return records
