"""Command-line front end.

Subcommands: analyze, normalize, actions, invert, singular, oracle, verify.
Exit codes: 0 success, 1 domain error, 2 bound/acceptance failure, 64 usage.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .actions import lower_bound_report, split_identities
from .cosine import CosineRef
from .errors import BoundViolated, MorseActionsError, SchemaError
from .inversion import EnergyMap, energy_derivs_at_energy
from .io_files import load_perturbed_hamiltonian, load_potential, write_csv, write_report
from .morse import morse_check
from .singularity import bottom_analyticity_check, fit_log_singularity
from .standard_form import normalize, standard_form_system
from .system import pure_system
from .verification import SUITES, run_suite

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_BOUND = 2
EXIT_USAGE = 64


def _threads():
    try:
        n = int(os.environ.get("MORSE_ACTIONS_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def parallel_map(fn, items):
    items = list(items)
    n = min(_threads(), len(items)) or 1
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parse_params(text):
    if text is None or text.strip() == "":
        return None
    return np.array([float(x) for x in text.split(",")])


def _parse_grid(spec, log=False):
    try:
        lo_s, hi_s, n_s = spec.split(":")
        lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    except ValueError:
        raise SchemaError(f"grid spec '{spec}' is not lo:hi:count") from None
    if n < 1:
        raise SchemaError("grid count must be >= 1")
    if n == 1:
        return np.array([lo])
    if log:
        if lo <= 0 or hi <= 0:
            raise SchemaError("log grid endpoints must be positive")
        return np.exp(np.linspace(math.log(lo), math.log(hi), n))
    return np.linspace(lo, hi, n)


def _system_for(args):
    pot = load_potential(args.potential)
    p_hat = _parse_params(args.params)
    if pot.n_params == 0:
        p_hat = None
    return pure_system(pot, p_hat, R0=args.R0, r0=args.r0)


def build_parser():
    p = _Parser(prog="morse-actions",
                description="Action-angle data for 1D Hamiltonians p^2 + G(q) "
                            "with Morse periodic potentials")
    p.add_argument("--version", action="version", version=f"morse-actions {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, potential=True):
        if potential:
            sp.add_argument("--potential", required=True, help="potential JSON file")
            sp.add_argument("--params", default=None, help="comma-separated parameter point")
            sp.add_argument("--R0", type=float, default=None, help="momentum half-width")
            sp.add_argument("--r0", type=float, default=1.0, help="parameter radius for constants")
        sp.add_argument("--out", default=None, help="output path (default: stdout)")
        sp.add_argument("--seed", type=int, default=0, help="seed recorded in reports")

    sp = sub.add_parser("analyze", help="Morse data and region table")
    common(sp)

    sp = sub.add_parser("normalize", help="standard form of a perturbed Hamiltonian")
    sp.add_argument("--hamiltonian", required=True, help="perturbed-Hamiltonian JSON file")
    sp.add_argument("--params", default=None)
    sp.add_argument("--out", default=None)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("actions", help="action and derivative over an energy grid")
    common(sp)
    sp.add_argument("--region", type=int, required=True)
    sp.add_argument("--energies", required=True, help="lo:hi:count")
    sp.add_argument("--log", action="store_true", help="log-spaced energy offsets from E_lo")

    sp = sub.add_parser("invert", help="energy from action over an action grid")
    common(sp)
    sp.add_argument("--region", type=int, required=True)
    sp.add_argument("--actions", required=True, help="lo:hi:count")
    sp.add_argument("--margin", type=float, default=None, help="energy margin from window edges")

    sp = sub.add_parser("singular", help="log-singularity fits per region edge")
    common(sp)
    sp.add_argument("--region", type=int, default=None)
    sp.add_argument("--side", choices=["minus", "plus"], default=None)

    sp = sub.add_parser("oracle", help="golden cosine-case tables")
    sp.add_argument("--eta", type=float, default=1.0)
    sp.add_argument("--region", type=int, required=True, choices=[0, 1, 2])
    sp.add_argument("--energies", required=True, help="lo:hi:count")
    sp.add_argument("--out", default=None)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("verify", help="run the acceptance suite")
    sp.add_argument("--suite", default="all", choices=sorted(SUITES))
    sp.add_argument("--out", default=None)
    sp.add_argument("--seed", type=int, default=0)
    return p


def _emit(text, out):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_analyze(args):
    system = _system_for(args)
    md = system.morse
    doc = {
        "morse": md.as_dict(),
        "regions": [w.as_dict() for w in system.regions.windows],
        "derivative_floors": lower_bound_report(system, n_grid=16, raise_on_fail=False),
    }
    text = write_report(doc, args.out, constants=system.pc.as_dict(), seed=args.seed)
    _emit(text or "", args.out)
    return EXIT_OK


def cmd_normalize(args):
    ph = load_perturbed_hamiltonian(args.hamiltonian)
    p_hat = _parse_params(args.params)
    sfs = normalize(ph, p_hat, strict=False)
    ledger = sfs.bounds_report()
    system = standard_form_system(sfs, p_hat)
    doc = {"bounds": ledger,
           "all_passed": all(e["passed"] for e in ledger),
           "regions": [w.as_dict() for w in system.regions.windows]}
    text = write_report(doc, args.out, constants=system.pc.as_dict(), seed=args.seed)
    _emit(text or "", args.out)
    return EXIT_OK if doc["all_passed"] else EXIT_BOUND


def cmd_actions(args):
    system = _system_for(args)
    w = system.window(args.region)
    if args.log:
        offs = _parse_grid(args.energies, log=True)
        energies = w.E_lo + offs
    else:
        energies = _parse_grid(args.energies)

    def row(E):
        E = float(E)
        I = system.action(args.region, E)
        d = system.action_deriv(args.region, E)
        rep = split_identities(system, E)
        resid = 0.0
        for rec in rep["wells"]:
            if rec["region"] == args.region:
                resid = rec["rel_residual"]
        if w.kind in ("rot+", "rot-") and rep["rotational"] is not None:
            resid = rep["rotational"]["rel_residual"]
        return (E, I, d, resid)

    rows = parallel_map(row, energies)
    text = write_csv(rows, args.out, header=["E", "I", "dI_dE", "residual"])
    _emit(text or "", args.out)
    return EXIT_OK


def cmd_invert(args):
    system = _system_for(args)
    emap = EnergyMap(system, args.region, lam=args.margin)
    acts = _parse_grid(args.actions)

    def row(I):
        I = float(I)
        E = emap.invert(I)
        dE, d2E = energy_derivs_at_energy(system, args.region, E)
        return (I, E, dE, d2E)

    rows = parallel_map(row, acts)
    text = write_csv(rows, args.out, header=["I", "E", "dE_dI", "d2E_dI2"])
    _emit(text or "", args.out)
    return EXIT_OK


def cmd_singular(args):
    system = _system_for(args)
    targets = []
    if args.region is not None:
        sides = [args.side] if args.side else \
            (["minus", "plus"] if system.window(args.region).kind == "well" else ["plus"])
        targets = [(args.region, s) for s in sides]
    else:
        for w in system.regions.windows:
            if w.kind == "well":
                targets += [(w.index, "minus"), (w.index, "plus")]
            elif w.kind in ("barrier", "rot+"):
                targets.append((w.index, "plus"))
    fits = []
    all_ok = True
    for region, side in targets:
        fit = fit_log_singularity(system, region, side)
        entry = fit.as_dict()
        if system.window(region).kind == "well" and side == "plus":
            entry["check"] = "analytic-bottom"
            entry["passed"] = abs(fit.psi0) <= 1e-6
            entry["bottom"] = bottom_analyticity_check(
                system, (region + 1) // 2, raise_on_fail=False)
        else:
            entry["check"] = "psi-floor"
            entry["passed"] = abs(fit.psi0) >= fit.psi_floor
        all_ok = all_ok and entry["passed"]
        fits.append(entry)
    doc = {"fits": fits, "all_passed": all_ok}
    text = write_report(doc, args.out, constants=system.pc.as_dict(), seed=args.seed)
    _emit(text or "", args.out)
    return EXIT_OK if all_ok else EXIT_BOUND


def cmd_oracle(args):
    ref = CosineRef(args.eta)
    energies = _parse_grid(args.energies)

    def row(E):
        E = float(E)
        return (E, ref.action(args.region, E), ref.action_deriv(args.region, E, 1),
                ref.action_deriv(args.region, E, 2))

    rows = parallel_map(row, energies)
    text = write_csv(rows, args.out, header=["E", "I", "dI_dE", "d2I_dE2"])
    _emit(text or "", args.out)
    return EXIT_OK


def cmd_verify(args):
    records = run_suite(args.suite)
    ok = all(r["passed"] for r in records)
    if args.out:
        write_report({"suite": args.suite, "criteria": records,
                      "all_passed": ok}, args.out, seed=args.seed)
    return EXIT_OK if ok else EXIT_BOUND


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    handlers = {
        "analyze": cmd_analyze,
        "normalize": cmd_normalize,
        "actions": cmd_actions,
        "invert": cmd_invert,
        "singular": cmd_singular,
        "oracle": cmd_oracle,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except BoundViolated as exc:
        print(f"bound failure: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except MorseActionsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    raise SystemExit(main())
