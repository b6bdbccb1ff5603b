"""Fixed-parameter 1D machinery: branches, regions, singular quadrature.

OneDSystem bundles a potential slice G (translated so the global maximum of
the base potential sits at -pi), its critical data, and the optional
momentum-correction hooks of a standard-form Hamiltonian.

Quadrature design.  After splitting each monotone branch at its mid energy,
the angle on each half is parametrized by the square-root energy coordinate
y of the adjacent critical point (y^2 = |G - E_crit|), where the
cancellation-free centered series keeps full accuracy.  A trigonometric or
hyperbolic substitution y(t) with dy = z dt (z = sqrt(E - G)) then removes
the turning-point singularity exactly, so every action/derivative integral
becomes a plain Gauss-Legendre sum of a smooth payload(sigma, J, z), with
J dy = d sigma the branch Jacobian.  This stays spectrally accurate with E
within 1e-10 of a separatrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import PaperConstants
from .errors import (
    EnergyOutOfBranch,
    EnergyOutOfWindow,
    R0TooSmall,
    TooCloseToSeparatrix,
)
from .morse import CriticalContinuation, MorseData, continue_critical_series, morse_check
from .quadrature import chebyshev_sqrt_weight, gauss_legendre, jacobi_sqrt_weight, trapezoid_periodic


class TrivialHooks:
    """Momentum machinery of a pure potential: b == 0, P(z) = z."""

    has_b = False

    @staticmethod
    def _zeros(*arrs):
        out = 0.0
        for a in arrs:
            out = out + 0.0 * np.asarray(a, dtype=float)
        return out

    def momentum(self, z, sigma):
        return np.asarray(z, dtype=float) + self._zeros(sigma)

    def dz_momentum(self, z, sigma):
        return 1.0 + self._zeros(z, sigma)

    def b_dag(self, v, sigma):
        return self._zeros(v, sigma)

    def b_tilde(self, v, sigma):
        return self._zeros(v, sigma)


@dataclass(frozen=True)
class RegionWindow:
    """One connected phase-space component at fixed parameters."""

    index: int
    kind: str                 # "well" | "barrier" | "rot+" | "rot-"
    E_lo: float
    E_hi: float
    branches: tuple           # monotone-branch indices covered by the q-range
    aux: dict = field(default_factory=dict)

    def contains(self, E):
        return self.E_lo < E < self.E_hi

    def as_dict(self):
        return {"index": self.index, "kind": self.kind, "E_lo": self.E_lo,
                "E_hi": self.E_hi, "branches": list(self.branches), **self.aux}


@dataclass(frozen=True)
class RegionTable:
    windows: tuple
    R0: float

    def __getitem__(self, i):
        for w in self.windows:
            if w.index == i:
                return w
        raise KeyError(f"no region {i}")

    def oscillatory(self):
        return [w for w in self.windows if w.kind in ("well", "barrier")]


def build_region_table(morse: MorseData, cont: CriticalContinuation, R0):
    M = morse.M
    if R0 < 2.0 * math.sqrt(M):
        raise R0TooSmall(f"R0 = {R0} < 2 sqrt(M) = {2.0 * math.sqrt(M):.6f}")
    N = morse.n_wells
    E = cont.energy  # length 2N+1, E[0] == E[2N]

    def Emax(i):
        return E[2 * i]

    windows = []
    for j in range(1, N + 1):
        j_dia = j - 1 if Emax(j - 1) < Emax(j) else j
        windows.append(RegionWindow(
            index=2 * j - 1, kind="well",
            E_lo=float(E[2 * j - 1]), E_hi=float(Emax(j_dia)),
            branches=(2 * j - 1, 2 * j), aux={"j_diamond": j_dia},
        ))
    for j in range(1, N):
        j_minus = max(i for i in range(j) if Emax(i) > Emax(j))
        j_plus = min(i for i in range(j + 1, N + 1) if Emax(i) > Emax(j))
        j_star = j_minus if Emax(j_minus) < Emax(j_plus) else j_plus
        windows.append(RegionWindow(
            index=2 * j, kind="barrier",
            E_lo=float(Emax(j)), E_hi=float(Emax(j_star)),
            branches=tuple(range(2 * j_minus + 1, 2 * j_plus + 1)),
            aux={"j_minus": j_minus, "j_plus": j_plus, "j_star": j_star},
        ))
    top = float(R0 ** 2 - 2.0 * M)
    for idx, kind in ((2 * N, "rot+"), (0, "rot-")):
        windows.append(RegionWindow(index=idx, kind=kind,
                                    E_lo=float(E[2 * N]), E_hi=top,
                                    branches=tuple(range(1, 2 * N + 1))))
    return RegionTable(windows=tuple(sorted(windows, key=lambda w: w.index)), R0=R0)


class OneDSystem:
    """Potential slice + critical data + momentum hooks at one parameter."""

    def __init__(self, series, morse, cont, R0=None, r0=1.0, hooks=None, quad_tol=1e-11):
        self.series = series
        self.morse = morse
        self.cont = cont
        self.th = cont.theta
        self.En = cont.energy
        self.N = morse.n_wells
        self.R0 = float(R0) if R0 is not None else 3.0 * math.sqrt(morse.M)
        self.r0 = float(r0)
        self.hooks = hooks if hooks is not None else TrivialHooks()
        self.pc = PaperConstants(M=morse.M, beta=morse.beta, s0=morse.s0, r0=self.r0)
        self.centered = [series.centered(self.th[i]) for i in range(2 * self.N + 1)]
        self.regions = build_region_table(morse, cont, self.R0)
        self.quad_tol = quad_tol
        # switch from the direct to the bottom-centered derivative path
        rs = self.pc.r_star.value
        self.switch = min(rs, 0.1 * morse.beta) if rs > 64 * np.finfo(float).eps * morse.M \
            else 0.1 * morse.beta

    # ---------------- branch geometry ----------------

    def branch_min_idx(self, i):
        return i if i % 2 == 1 else i - 1

    def branch_max_idx(self, i):
        return i - 1 if i % 2 == 1 else i

    def branch_interval(self, i):
        return float(self.th[i - 1]), float(self.th[i])

    def branch_energy_window(self, i):
        return (float(self.En[self.branch_min_idx(i)]),
                float(self.En[self.branch_max_idx(i)]))

    def _dir_from_min(self, i):
        return -1.0 if i % 2 == 1 else 1.0

    def _dir_from_max(self, i):
        return 1.0 if i % 2 == 1 else -1.0

    # ---------------- stable deviation solver ----------------

    def theta_dev(self, c, direction, y, gap):
        """Deviation u (sign of ``direction``) with |G(th_c + u) - E_c| = y^2."""
        cen = self.centered[c]
        y = np.asarray(y, dtype=float)
        sgn = 1.0 if c % 2 == 1 else -1.0
        target = sgn * y * y
        u = direction * np.minimum(y * math.sqrt(2.0 / abs(cen.g2)), 0.999 * gap)
        for _ in range(100):
            f = cen.delta(u) - target
            df = cen.dvalue(u)
            step = f / df
            un = u - step
            un = direction * np.clip(direction * un, 0.0, 0.9999 * gap)
            done = np.max(np.abs(un - u)) <= 1e-16 * (1.0 + np.max(np.abs(un)))
            u = un
            if done:
                break
        return u

    def sqrt_factor(self, i, side, y):
        """Sigma_{i,side}(y) = |Theta_i(E) - theta_c| / sqrt(|E - E_c|).

        side=-1 is centered at the branch minimum (E = E_min + y^2), side=+1
        at the branch maximum (E = E_max - y^2); Sigma(0) = sqrt(2/|G''|).
        Negative y evaluates the mirror branch across the critical point.
        """
        if y < 0:
            if side == -1:
                mirror = i + 1 if i % 2 == 1 else i - 1
            else:
                mirror = i - 1 if i % 2 == 1 else i + 1
            if mirror < 1:
                mirror += 2 * self.N
            elif mirror > 2 * self.N:
                mirror -= 2 * self.N
            return self.sqrt_factor(mirror, side, -y)
        c = self.branch_min_idx(i) if side == -1 else self.branch_max_idx(i)
        cen = self.centered[c]
        if y == 0.0:
            return math.sqrt(2.0 / abs(cen.g2))
        lo, hi = self.branch_energy_window(i)
        if y * y > (0.95 ** 2) * (hi - lo):
            raise TooCloseToSeparatrix(
                f"y^2 = {y * y:.3e} beyond 0.95^2 x branch height {hi - lo:.3e}")
        direction = self._dir_from_min(i) if side == -1 else self._dir_from_max(i)
        a, b = self.branch_interval(i)
        u = self.theta_dev(c, direction, np.array([float(y)]), gap=b - a)[0]
        return abs(u) / y

    # ---------------- raw branch inversion ----------------

    def branch_invert(self, i, E):
        """theta in [th[i-1], th[i]] with G(theta) = E (machine accurate)."""
        lo, hi = self.branch_energy_window(i)
        e_lo, e_hi = min(lo, hi), max(lo, hi)
        E_arr = np.asarray(E, dtype=float)
        scalar = E_arr.ndim == 0
        E_arr = np.atleast_1d(E_arr)
        if np.any((E_arr < e_lo) | (E_arr > e_hi)):
            raise EnergyOutOfBranch(f"branch {i}: energy outside [{e_lo}, {e_hi}]")
        a, b = self.branch_interval(i)
        fa = np.full_like(E_arr, a)
        fb = np.full_like(E_arr, b)
        inc = 1.0 if i % 2 == 0 else -1.0   # G increasing on even branches
        for _ in range(70):
            mid = 0.5 * (fa + fb)
            gm = self.series.eval(mid, 0)
            take_lo = inc * (gm - E_arr) < 0
            fa = np.where(take_lo, mid, fa)
            fb = np.where(take_lo, fb, mid)
        th = 0.5 * (fa + fb)
        for _ in range(4):
            g1 = self.series.eval(th, 1)
            g0 = self.series.eval(th, 0)
            safe = np.abs(g1) > 0
            th = np.clip(th - np.where(safe, (g0 - E_arr) / np.where(safe, g1, 1.0), 0.0), a, b)
        return float(th[0]) if scalar else th

    # ---------------- piece evaluation ----------------

    def _sigma_J(self, c, direction, y, gap, stable, branch):
        """(sigma, J) with d sigma = J dy along the branch piece."""
        y = np.asarray(y, dtype=float)
        if stable:
            u = self.theta_dev(c, direction, y, gap)
            dv = np.abs(self.centered[c].dvalue(u))
            sigma = self.th[c] + u
        else:
            sgn = 1.0 if c % 2 == 1 else -1.0
            sigma = self.branch_invert(branch, self.En[c] + sgn * y * y)
            dv = np.abs(self.series.eval(sigma, 1))
        with np.errstate(divide="ignore", invalid="ignore"):
            J = 2.0 * y / dv
        lim = math.sqrt(2.0 / abs(self.centered[c].g2))
        J = np.where(y == 0.0, lim, J)
        return sigma, J

    def _piece(self, i, side, E, payload, stable=True, tol=None):
        """Integral over one half-branch of payload(sigma, J, z) dt, dy = z dt.

        side "min": y = sqrt(G - E_min), covers the half adjacent to the
        branch minimum up to the mid-energy split; side "max": y =
        sqrt(E_max - G) for the other half.  Returns 0 for empty pieces.
        """
        tol = self.quad_tol if tol is None else tol
        lo, hi = self.branch_energy_window(i)
        E_sp = 0.5 * (lo + hi)
        a, b = self.branch_interval(i)
        gap = b - a
        if side == "min":
            c = self.branch_min_idx(i)
            direction = self._dir_from_min(i)
            v = E - lo
            if v <= 0.0:
                return 0.0
            sv = math.sqrt(v)
            y_hi = math.sqrt(min(E, E_sp) - lo)
            t_hi = math.asin(min(1.0, y_hi / sv))

            def y_z(t):
                return sv * np.sin(t), sv * np.cos(t)
        else:
            c = self.branch_max_idx(i)
            direction = self._dir_from_max(i)
            delta = hi - E
            Y = math.sqrt(hi - E_sp)
            if delta > 0.0:
                sd = math.sqrt(delta)
                if sd >= Y:
                    return 0.0
                t_hi = math.acosh(Y / sd)

                def y_z(t):
                    return sd * np.cosh(t), sd * np.sinh(t)
            else:
                sd = math.sqrt(-delta)
                if sd == 0.0:
                    raise EnergyOutOfWindow("energy exactly at a critical value")
                t_hi = math.asinh(Y / sd)

                def y_z(t):
                    return sd * np.sinh(t), sd * np.cosh(t)
        if t_hi <= 0.0:
            return 0.0

        def f(t):
            y, z = y_z(t)
            sigma, J = self._sigma_J(c, direction, y, gap, stable, branch=i)
            return payload(sigma, J, z)

        return gauss_legendre(f, 0.0, t_hi, tol=tol, n0=16)

    # payloads -----------------------------------------------------------

    def _pay_action(self):
        h = self.hooks

        def pay(sigma, J, z):
            v = z * z
            return (v * (1.0 + h.b_dag(v, sigma)) * J) / np.pi

        return pay

    def _pay_deriv(self):
        h = self.hooks

        def pay(sigma, J, z):
            return (1.0 + h.b_tilde(z * z, sigma)) * J / (2.0 * np.pi)

        return pay

    def _pay_rot_action(self, sign):
        h = self.hooks

        def pay(sigma, J, z):
            return h.momentum(sign * z, sigma) * J * z / (2.0 * np.pi)

        return pay

    def _pay_rot_deriv(self, sign):
        h = self.hooks

        def pay(sigma, J, z):
            return sign * h.dz_momentum(sign * z, sigma) * J / (4.0 * np.pi)

        return pay

    def _pay_momentum_gap(self):
        """P(z) - P(-z) form of the oscillatory integrand (for cross-checks)."""
        h = self.hooks

        def pay(sigma, J, z):
            return (h.momentum(z, sigma) - h.momentum(-z, sigma)) * J * z / (2.0 * np.pi)

        return pay

    # branch-level split components --------------------------------------

    def branch_action(self, i, E, stable=True, tol=None):
        """(1/pi) int sqrt(E-G)(1+b_dag) over the covered part of branch i.

        Equals the +/- split component of the oscillatory actions; for
        E above the branch maximum it is the full-interval well integral.
        """
        pay = self._pay_action()
        return (self._piece(i, "min", E, pay, stable, tol)
                + self._piece(i, "max", E, pay, stable, tol))

    def branch_action_deriv(self, i, E, stable=True, tol=None):
        pay = self._pay_deriv()
        return (self._piece(i, "min", E, pay, stable, tol)
                + self._piece(i, "max", E, pay, stable, tol))

    # ---------------- region-level evaluation ----------------

    def window(self, region):
        return self.regions[region]

    def _check_window(self, w, E):
        if not w.contains(E):
            raise EnergyOutOfWindow(
                f"region {w.index}: E = {E} outside ({w.E_lo}, {w.E_hi})")

    def action(self, region, E, tol=None):
        """I_n^{(region)}(E)."""
        w = self.window(region)
        self._check_window(w, E)
        if w.kind in ("well", "barrier"):
            return sum(self.branch_action(k, E, True, tol) for k in w.branches)
        sign = 1.0 if w.kind == "rot+" else -1.0
        if E - w.E_lo >= self.switch:
            h = self.hooks
            ser = self.series

            def f(th):
                emg = np.maximum(E - ser.eval(th, 0), 0.0)
                return h.momentum(sign * np.sqrt(emg), th)

            return trapezoid_periodic(f, tol=tol or self.quad_tol)
        pay = self._pay_rot_action(sign)
        return sum(self._piece(k, side, E, pay, True, tol)
                   for k in w.branches for side in ("min", "max"))

    def action_deriv(self, region, E, path="auto", tol=None):
        """dI/dE on a region.

        path: "auto" (bottom-centered near critical energies, piecewise
        split elsewhere), "stable"/"direct" (Chebyshev rule on the
        whole-well substitution with stable/raw branch evaluation; odd
        regions only), or "split" (piecewise assembly).
        """
        w = self.window(region)
        self._check_window(w, E)
        if w.kind == "well":
            v = E - w.E_lo
            min_height = min(self.branch_energy_window(k)[1] - self.branch_energy_window(k)[0]
                             for k in w.branches)
            if path == "auto":
                path = "stable" if v < min(self.switch, 0.25 * (w.E_hi - w.E_lo)) else "split"
            if path == "direct" and v >= (0.85 ** 2) * min_height:
                # raw-inversion variant of the piecewise assembly
                return sum(self.branch_action_deriv(k, E, False, tol) for k in w.branches)
            if path in ("stable", "direct"):
                return self._well_deriv_chebyshev(w, E, stable=(path == "stable"), tol=tol)
            return sum(self.branch_action_deriv(k, E, True, tol) for k in w.branches)
        if w.kind == "barrier":
            stable = path != "direct"
            return sum(self.branch_action_deriv(k, E, stable, tol) for k in w.branches)
        sign = 1.0 if w.kind == "rot+" else -1.0
        if E - w.E_lo >= self.switch:
            h = self.hooks
            ser = self.series

            def f(th):
                z = np.sqrt(np.maximum(E - ser.eval(th, 0), 1e-300))
                return sign * h.dz_momentum(sign * z, th) / (2.0 * z)

            return trapezoid_periodic(f, tol=tol or self.quad_tol)
        pay = self._pay_rot_deriv(sign)
        return sum(self._piece(k, side, E, pay, True, tol)
                   for k in w.branches for side in ("min", "max"))

    def _well_deriv_chebyshev(self, w, E, stable, tol):
        """Whole-well derivative via the bottom-energy substitution.

        E(t) = t E_min + (1-t) E maps both turning points to t = 0 and the
        well bottom to t = 1; the weight 1/(sqrt(t) sqrt(1-t)) is handled by
        Gauss-Chebyshev exactly.  Valid while sqrt(E - E_min) stays inside
        both adjacent branches.
        """
        i_left, i_right = w.branches
        m = self.branch_min_idx(i_left)
        v = E - w.E_lo
        for i in (i_left, i_right):
            lo, hi = self.branch_energy_window(i)
            if v >= (0.95 ** 2) * (hi - lo):
                raise EnergyOutOfWindow(
                    "whole-well substitution invalid this close to the top; "
                    "use path='split'")
        h = self.hooks
        a_l, b_l = self.branch_interval(i_left)
        a_r, b_r = self.branch_interval(i_right)

        def g(t):
            y = np.sqrt((1.0 - t) * v)
            out = 0.0
            for i, gap, direction in ((i_left, b_l - a_l, self._dir_from_min(i_left)),
                                      (i_right, b_r - a_r, self._dir_from_min(i_right))):
                sigma, J = self._sigma_J(m, direction, y, gap, stable, branch=i)
                out = out + (1.0 + h.b_tilde(t * v, sigma)) * J
            return out

        return chebyshev_sqrt_weight(g, tol=tol or self.quad_tol) / (4.0 * np.pi)

    def well_action_jacobi(self, w, E, tol=None):
        """Whole-well action via the same substitution, Gauss-Jacobi weight.

        Independent route used by the split-identity checks.  The two branch
        integrands must be summed before integrating: each alone carries a
        sqrt(1-t) half-power at the bottom that only their sum cancels.
        """
        i_left, i_right = w.branches
        m = self.branch_min_idx(i_left)
        v = E - w.E_lo
        h = self.hooks
        sides = []
        for i in (i_left, i_right):
            lo, hi = self.branch_energy_window(i)
            if v >= (0.95 ** 2) * (hi - lo):
                raise EnergyOutOfWindow("substitution invalid this close to the top")
            a, b = self.branch_interval(i)
            sides.append((i, b - a, self._dir_from_min(i)))

        def g(t):
            y = np.sqrt((1.0 - t) * v)
            out = 0.0
            for i, gap, direction in sides:
                sigma, J = self._sigma_J(m, direction, y, gap, True, branch=i)
                out = out + (1.0 + h.b_dag(t * v, sigma)) * J
            return out

        return v * jacobi_sqrt_weight(g, tol=tol or self.quad_tol) / (2.0 * np.pi)

    def action_deriv2(self, region, E, tol=None):
        """d^2 I/dE^2: Richardson-extrapolated differences of dI/dE.

        The step scales with the local variation scale of dI/dE (distance
        to the nearest critical energy, capped by the window and by beta),
        so the estimate stays accurate both deep inside huge rotational
        windows and within 1e-6 of a separatrix.
        """
        w = self.window(region)
        self._check_window(w, E)
        dist = min(E - w.E_lo, w.E_hi - E)
        width = w.E_hi - w.E_lo
        scale = min(width, E - w.E_lo + self.morse.beta)
        h = min(0.2 * dist, 0.02 * scale)
        tol = tol or min(self.quad_tol, 1e-12)

        def d2(step):
            fp = self.action_deriv(region, E + step, tol=tol)
            fm = self.action_deriv(region, E - step, tol=tol)
            return (fp - fm) / (2.0 * step)

        coarse = d2(h)
        fine = d2(h / 2.0)
        return (4.0 * fine - coarse) / 3.0

    def flank_pair_deriv(self, max_idx, E, tol=None):
        """Sum of the two full half-well derivative integrals flanking a maximum.

        For an interior maximum 2j this is d/dE of I^{(2j),-} + I^{(2j),+};
        for the global maximum (index 2N or 0) the pair wraps around and the
        sum equals 2 dI^{(2N)}/dE when the +/- momentum branches mirror.
        """
        if max_idx % 2 == 1:
            raise ValueError("flank pair is defined at maxima (even indices)")
        left = max_idx if max_idx >= 1 else 2 * self.N
        right = max_idx + 1 if max_idx + 1 <= 2 * self.N else 1
        pay = self._pay_deriv()
        out = 0.0
        for i in (left, right):
            out += (self._piece(i, "min", E, pay, True, tol)
                    + self._piece(i, "max", E, pay, True, tol))
        return out

    def twist_at_energy(self, region, E):
        """-d^2E/dI^2 sign convention handled by the caller; raw formula."""
        d1 = self.action_deriv(region, E)
        d2 = self.action_deriv2(region, E)
        return -d2 / d1 ** 3


def pure_system(pot, p_hat=None, R0=None, r0=1.0, quad_tol=1e-11):
    """OneDSystem for the Hamiltonian p^2 + G(q) with no momentum coupling."""
    md = morse_check(pot, p_hat)
    series = pot.series_at(p_hat).translated(md.offset)
    cont = continue_critical_series(series, md, eta=None)
    return OneDSystem(series, md, cont, R0=R0, r0=r0, quad_tol=quad_tol)


def perturbed_system(pot_G, base_morse, p_hat=None, eta=None, R0=None, r0=1.0,
                     quad_tol=1e-11):
    """OneDSystem for a perturbed potential continued from a base Morse datum."""
    series = pot_G.series_at(p_hat).translated(base_morse.offset)
    cont = continue_critical_series(series, base_morse, eta=eta)
    return OneDSystem(series, base_morse, cont, R0=R0, r0=r0, quad_tol=quad_tol)
