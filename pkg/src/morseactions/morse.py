"""Morse certification and critical-point continuation.

morse_check certifies that a potential at a fixed parameter value is Morse
non-degenerate, locates all critical points and energies, and rotates the
angle so the unique global maximum sits at -pi.  continue_critical tracks
those critical points to a nearby perturbed potential.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import PaperConstants
from .errors import (
    BoundViolated,
    ContinuationDiverged,
    DegenerateCriticalPoint,
    ExtraCriticalPoint,
    NoCriticalPoints,
    NonDistinctCriticalValues,
)
from .potential import strip_sup_bound

TOL_DEGENERATE_REL = 1e-9
TOL_VALUES_REL = 1e-9


@dataclass(frozen=True)
class MorseData:
    """Critical structure of a potential at a fixed parameter value.

    crit_points holds theta_0 = -pi < theta_1 < ... < theta_2N = pi in the
    translated coordinate (global maximum moved to -pi); crit_energies is
    aligned with it and satisfies E[0] == E[2N].  Odd indices are minima,
    even indices maxima.
    """

    n_wells: int
    crit_points: np.ndarray
    crit_energies: np.ndarray
    beta: float
    M: float
    s0: float
    offset: float

    @property
    def theta_star(self):
        return float(np.sqrt(self.beta * self.s0 ** 3 / (3.0 * self.M)))

    @property
    def theta_sharp(self):
        return self.beta * self.s0 ** 3 / (6.0 * self.M)

    def constants(self, r0=1.0):
        return PaperConstants(M=self.M, beta=self.beta, s0=self.s0, r0=r0)

    def is_minimum(self, i):
        return i % 2 == 1

    def as_dict(self):
        return {
            "n_wells": self.n_wells,
            "crit_points": self.crit_points.tolist(),
            "crit_energies": self.crit_energies.tolist(),
            "beta": self.beta,
            "M": self.M,
            "s0": self.s0,
            "offset": self.offset,
            "theta_star": self.theta_star,
        }


def _newton_polish(series, theta, max_iter=60):
    for _ in range(max_iter):
        g1 = series.eval(theta, 1)
        g2 = series.eval(theta, 2)
        if g2 == 0.0:
            break
        step = g1 / g2
        theta = theta - step
        if abs(step) < 1e-15:
            break
    return theta


def _scan_roots(series, n):
    """Approximate zeros of the derivative by sign changes on an n-grid."""
    # offset the grid by an irrational fraction of a cell so that symmetric
    # potentials do not place roots exactly on nodes
    th = -np.pi + 2.0 * np.pi * (np.arange(n) + 0.5 / np.sqrt(2.0)) / n
    d = series.eval(th, 1)
    nxt = np.roll(d, -1)
    exact = np.nonzero(d == 0.0)[0]
    idx = np.nonzero(d * nxt < 0)[0]
    # linear interpolation within each bracketing cell
    h = 2.0 * np.pi / n
    t0 = th[idx]
    d0, d1 = d[idx], nxt[idx]
    roots = t0 + h * d0 / (d0 - d1)
    if len(exact):
        roots = np.concatenate([roots, th[exact]])
    return np.sort(roots)


def find_critical_points(series, n0=4096):
    """All critical angles in [-pi, pi), grid scan + Newton polish."""
    scale = np.sum(np.hypot(series.a, series.b) * series._k)
    if scale == 0.0:
        raise NoCriticalPoints("constant potential")
    n = n0
    prev_count = -1
    stable = 0
    roots = None
    while stable < 2 and n <= 2 ** 21:
        roots = _scan_roots(series, n)
        if len(roots) == prev_count:
            stable += 1
        else:
            stable = 0
        prev_count = len(roots)
        n *= 2
    roots = np.array(sorted(_newton_polish(series, r) for r in roots))
    # wrap into [-pi, pi) and deduplicate
    roots = np.angle(np.exp(1j * roots))
    roots.sort()
    keep = [roots[0]]
    for r in roots[1:]:
        if r - keep[-1] > 1e-9:
            keep.append(r)
    if len(keep) >= 2 and (keep[0] + 2 * np.pi) - keep[-1] <= 1e-9:
        keep.pop()
    return np.array(keep)


def morse_check(pot, p_hat=None, s0=None):
    """Certify Morse non-degeneracy at a parameter point.

    Returns MorseData in the translated coordinate (global maximum at -pi).
    Raises DegenerateCriticalPoint / NonDistinctCriticalValues /
    NoCriticalPoints for inadmissible inputs.
    """
    s0 = pot.s0 if s0 is None else s0
    series = pot.series_at(p_hat)
    M = strip_sup_bound(pot, s0, p_hat)
    return morse_check_series(series, s0, M)


def morse_check_series(series, s0, M):
    """morse_check on a fixed-parameter TrigSeries with a given strip bound M."""
    roots = find_critical_points(series)
    d2 = series.eval(roots, 2)
    if np.any(np.abs(d2) < TOL_DEGENERATE_REL * M):
        bad = roots[np.argmin(np.abs(d2))]
        raise DegenerateCriticalPoint(f"|F''({bad:.6f})| = {np.min(np.abs(d2)):.3e}")
    energies = series.eval(roots, 0)
    n_crit = len(roots)
    if n_crit % 2 != 0:
        raise BoundViolated("alternation", f"odd number of critical points: {n_crit}")
    dv = np.abs(energies[:, None] - energies[None, :]) + np.eye(n_crit)
    if np.min(dv) < TOL_VALUES_REL * M:
        raise NonDistinctCriticalValues(f"min separation {np.min(dv):.3e}")

    # rotate the global maximum to -pi
    gi = int(np.argmax(energies))
    if d2[gi] >= 0:
        raise BoundViolated("alternation", "global max classified as minimum")
    offset = float(np.angle(np.exp(1j * (roots[gi] + np.pi))))
    tseries = series.translated(offset)
    troots = np.angle(np.exp(1j * (roots - offset)))
    order = np.argsort(troots)
    troots = troots[order]
    tens = energies[order]
    td2 = d2[order]
    # pull the global max (now nearest -pi or +pi) to the -pi slot
    if not np.isclose(tens[0], np.max(energies)):
        # max landed at +pi due to wrap; rotate the arrays
        troots = np.concatenate([[troots[-1] - 2 * np.pi], troots[:-1]])
        tens = np.concatenate([[tens[-1]], tens[:-1]])
        td2 = np.concatenate([[td2[-1]], td2[:-1]])
    troots[0] = -np.pi
    troots = _newton_polish_all(tseries, troots)
    tens = tseries.eval(troots, 0)

    # alternation: even slots maxima, odd slots minima
    for i in range(n_crit):
        want_min = i % 2 == 1
        if want_min != (td2[i] > 0):
            raise BoundViolated("alternation", f"slot {i} curvature {td2[i]:+.3e}")

    N = n_crit // 2
    crit_points = np.concatenate([troots, [troots[0] + 2 * np.pi]])
    crit_energies = np.concatenate([tens, [tens[0]]])

    # beta = min(derivative floor, critical-value separation)
    nfine = 1 << 16
    th = -np.pi + 2.0 * np.pi * np.arange(nfine) / nfine
    floor = float(np.min(np.abs(tseries.eval(th, 1)) + np.abs(tseries.eval(th, 2))))
    vals = crit_energies[1:]
    sep = float(np.min(np.abs(vals[:, None] - vals[None, :]) + 2 * M * np.eye(2 * N)))
    beta = min(floor, sep)

    data = MorseData(
        n_wells=N,
        crit_points=crit_points,
        crit_energies=crit_energies,
        beta=beta,
        M=M,
        s0=s0,
        offset=offset,
    )
    _check_structure(data)
    return data


def _newton_polish_all(series, roots):
    out = roots.copy()
    for i in range(1, len(out)):
        out[i] = _newton_polish(series, out[i])
    # slot 0 is the max at -pi: polish around -pi keeping the value wrapped
    r0 = _newton_polish(series, out[0])
    out[0] = r0 if r0 <= out[1] else r0 - 2 * np.pi
    return out


def _check_structure(data):
    gaps = np.diff(data.crit_points)
    if np.any(gaps < 2.0 * data.theta_star * (1 - 1e-9)):
        raise BoundViolated("gap", f"min gap {gaps.min():.3e} < 2 theta_* = {2 * data.theta_star:.3e}")
    if data.n_wells > np.pi / (2.0 * data.theta_star) * (1 + 1e-12):
        raise BoundViolated("well-count", f"N = {data.n_wells}")
    M, b, s0 = data.M, data.beta, data.s0
    if b > 2 * M * (1 + 1e-12) or b * s0 > 2 * M * (1 + 1e-12) or b * s0 ** 2 > 4 * M * (1 + 1e-12):
        raise BoundViolated("consistency", f"beta={b}, M={M}, s0={s0}")


@dataclass(frozen=True)
class CriticalContinuation:
    """Critical points/energies of the perturbed potential at one parameter.

    theta/energy arrays are indexed 0..2N like MorseData.crit_points, with
    theta[0] = theta[2N] - 2*pi and energy[0] = energy[2N].
    """

    theta: np.ndarray
    energy: np.ndarray
    eta: float

    @property
    def n_wells(self):
        return (len(self.theta) - 1) // 2


def continue_critical(pot_G, morse_F, p_hat=None, eta=None):
    """Continue the critical points of the base potential to pot_G.

    eta is the caller's bound on the perturbation size; it is used for the
    displacement checks, not as a gate (the paper threshold is advisory at
    numeric scale).
    """
    series = pot_G.series_at(p_hat).translated(morse_F.offset)
    return continue_critical_series(series, morse_F, eta)


def continue_critical_series(series_G, morse_F, eta=None):
    md = morse_F
    n_crit = 2 * md.n_wells
    theta = np.empty(n_crit + 1)
    ball = md.s0 / 8.0
    for i in range(1, n_crit + 1):
        seed = md.crit_points[i]
        th = seed
        for _ in range(100):
            g1 = series_G.eval(th, 1)
            g2 = series_G.eval(th, 2)
            step = g1 / g2
            th -= step
            if abs(th - seed) > ball:
                raise ContinuationDiverged(f"index {i}: left |theta - seed| <= s0/8")
            if abs(step) < 1e-15:
                break
        theta[i] = th
    theta[0] = theta[n_crit] - 2.0 * np.pi
    energy = series_G.eval(theta, 0)
    energy[0] = energy[n_crit]

    if eta is not None and eta > 0:
        disp = np.max(np.abs(theta - md.crit_points))
        if disp > 2.0 * eta / (md.beta * md.s0) * (1 + 1e-6) + 1e-14:
            raise BoundViolated("octoberx", f"max displacement {disp:.3e} > 2 eta / beta s0")
        edisp = np.max(np.abs(energy - md.crit_energies))
        if edisp > 2.0 * eta * (1 + 1e-6) + 1e-14:
            raise BoundViolated("october", f"max energy shift {edisp:.3e} > 2 eta")
    if np.any(np.diff(theta) <= 0):
        raise ContinuationDiverged("continued points out of order")

    _completeness_scan(series_G, theta, md)
    return CriticalContinuation(theta=theta, energy=energy, eta=0.0 if eta is None else eta)


def _completeness_scan(series_G, theta, md):
    """No critical points of G other than the continued ones (fine grid)."""
    roots = find_critical_points(series_G)
    for r in roots:
        d = np.abs(np.angle(np.exp(1j * (r - theta[1:]))))
        if np.min(d) > md.theta_star / 2.0:
            raise ExtraCriticalPoint(f"unmatched zero of G' at {r:.6f}")
    if len(roots) != 2 * md.n_wells:
        raise ExtraCriticalPoint(f"{len(roots)} critical points, expected {2 * md.n_wells}")
