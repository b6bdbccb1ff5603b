"""Normalization of H* = P_n^2 + G(P, Q_n) into standard form.

The normalized Hamiltonian is (1 + b)(p_n - Pstar)^2 + Gm(q_n), obtained by
the momentum shift p_n -> p_n - Pstar + P(q_n) where P solves the fixed
point P = -1/2 d_{P_n} G(P, q_n).  The auxiliary functions b_sharp, b_dag,
b_tilde feed the action integrals of the normalized system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundViolated, ContractionFailed, NegativeRadicand
from .morse import morse_check
from .potential import FourierPotential, ParamPolynomial, TrigSeries
from .system import OneDSystem, perturbed_system

_GL32 = np.polynomial.legendre.leggauss(32)


@dataclass(frozen=True)
class PerturbedHamiltonian:
    """H*(P, Q) = P_n^2 + F(Q_n) + f(p_hat, P_n, Q_n).

    The perturbation f is a Fourier polynomial in Q_n whose coefficients are
    ParamPolynomial instances in (p_hat..., P_n), the momentum always the
    last variable.  eta0 is the declared size of sup |G - F| over the
    complex product domain; it gates the normalization hypothesis
    eta0 <= (r0^2/64) min(s0/pi, 1).
    """

    base: FourierPotential
    pert_cos: tuple        # k = 0..Kp   ParamPolynomial in (p_hat, P_n)
    pert_sin: tuple        # k = 0..Kp   (index 0 unused)
    eta0: float
    r0: float
    R0: float
    s_hat: float = 0.0

    @property
    def s0(self):
        return self.base.s0

    @property
    def Kp(self):
        return len(self.pert_cos) - 1

    def _coeff_tables(self, p_hat, order):
        """1D momentum-polynomial coefficients of d^order_{P} f per harmonic."""
        tabs = []
        for polys in (self.pert_cos, self.pert_sin):
            rows = []
            for poly in polys:
                p = poly
                for _ in range(order):
                    p = p.derivative(p.coeffs.ndim - 1)
                rows.append(p.collapse_last(p_hat) if p.coeffs.ndim else np.array([float(p.coeffs)]))
            tabs.append(rows)
        return tabs

    def pert_eval(self, p_hat, P, q, dP_order=0):
        """d^order_{P} f at paired arrays (P, q)."""
        P = np.asarray(P, dtype=float)
        q = np.asarray(q, dtype=float)
        ctab, stab = self._coeff_tables(tuple(np.atleast_1d(p_hat)) if p_hat is not None else (), dP_order)
        out = np.zeros(np.broadcast(P, q).shape)
        for k in range(self.Kp + 1):
            ck = np.polynomial.polynomial.polyval(P, ctab[k])
            if k == 0:
                out = out + ck
                continue
            sk = np.polynomial.polynomial.polyval(P, stab[k])
            out = out + ck * np.cos(k * q) + sk * np.sin(k * q)
        return out

    def G(self, p_hat, P, q, dP_order=0):
        """d^order_{P} of the full potential G = F + f."""
        base = self.base.eval(q, None if self.base.n_params == 0 else p_hat, 0) \
            if dP_order == 0 else 0.0
        return base + self.pert_eval(p_hat, P, q, dP_order)

    def hamiltonian(self, p_hat, P_n, Q_n):
        return np.asarray(P_n, dtype=float) ** 2 + self.G(p_hat, P_n, Q_n)


class SFSlice:
    """Standard-form data at a fixed parameter point."""

    def __init__(self, ph: PerturbedHamiltonian, p_hat, n_q=512):
        self.ph = ph
        self.p_hat = None if p_hat is None else tuple(np.atleast_1d(p_hat))
        self.eta = 100.0 * ph.eta0     # size constant entering the b_dag bounds
        q, P = self._solve_fixed_point(n_q)
        self.P_series = TrigSeries.from_samples(P)
        self.Pstar = self.P_series.c0
        self.a_star = TrigSeries(self.P_series.a, self.P_series.b, 0.0)
        k = np.arange(1, len(self.P_series.a) + 1, dtype=float)
        # phi with d phi / dq = a_star and zero mean
        self.phi = TrigSeries(-self.P_series.b / k, self.P_series.a / k, 0.0)
        Gm_vals = ph.G(self.p_hat, P, q) + P ** 2
        self.Gm = TrigSeries.from_samples(Gm_vals)

    def _solve_fixed_point(self, n_q):
        ph = self.ph
        for _ in range(6):
            q = 2.0 * np.pi * np.arange(n_q) / n_q
            P = np.zeros(n_q)
            prev = math.inf
            ok = False
            for _ in range(200):
                Pn = -0.5 * ph.pert_eval(self.p_hat, P, q, dP_order=1)
                res = float(np.max(np.abs(Pn - P)))
                P = Pn
                if res <= 1e-14 * max(ph.r0, 1.0):
                    ok = True
                    break
                if res > 0.75 * prev and res > 1e-13 * ph.r0:
                    raise ContractionFailed(f"momentum fixed point residual {res:.3e} not contracting")
                prev = res
            if not ok:
                raise ContractionFailed("momentum fixed point did not reach 1e-13 r0")
            tail = np.abs(np.fft.rfft(P))[-max(2, n_q // 8):]
            if np.max(tail) <= 1e-15 * max(1.0, np.max(np.abs(P))) * n_q:
                return q, P
            n_q *= 2
        return q, P

    # --- kinetic factor and momentum solver ---

    def b(self, P_n, q):
        """(1+b) factor via the second-derivative integral form."""
        P_n = np.asarray(P_n, dtype=float)
        q = np.asarray(q, dtype=float)
        Pq = self.P_series.eval(q, 0)
        dp = P_n - self.Pstar
        t, w = _GL32
        t = 0.5 * (t + 1.0)
        w = 0.5 * w
        out = 0.0
        for ti, wi in zip(t, w):
            out = out + wi * (1.0 - ti) * self.ph.pert_eval(self.p_hat, Pq + ti * dp, q, dP_order=2)
        return out

    def dpn_b(self, P_n, q):
        P_n = np.asarray(P_n, dtype=float)
        q = np.asarray(q, dtype=float)
        Pq = self.P_series.eval(q, 0)
        dp = P_n - self.Pstar
        t, w = _GL32
        t = 0.5 * (t + 1.0)
        w = 0.5 * w
        out = 0.0
        for ti, wi in zip(t, w):
            out = out + wi * (1.0 - ti) * ti * self.ph.pert_eval(self.p_hat, Pq + ti * dp, q, dP_order=3)
        return out

    def momentum(self, z, q):
        """P(z, q) solving Pstar + z / sqrt(1 + b(P, q)) = P."""
        z = np.asarray(z, dtype=float)
        q = np.asarray(q, dtype=float)
        shape = np.broadcast(z, q).shape
        Pt = np.full(shape, self.Pstar)
        prev = math.inf
        for _ in range(200):
            rad = 1.0 + self.b(z + Pt, q)
            if np.any(rad <= 0.0):
                raise NegativeRadicand("1 + b has nonpositive values")
            Pn = self.Pstar + (1.0 / np.sqrt(rad) - 1.0) * z
            res = float(np.max(np.abs(Pn - Pt))) if Pn.shape else abs(Pn - Pt)
            Pt = Pn
            if res <= 1e-13 * max(self.ph.r0, 1.0):
                break
            if res > 0.75 * prev and res > 1e-12 * self.ph.r0:
                raise ContractionFailed(f"momentum solver residual {res:.3e} not contracting")
            prev = res
        else:
            raise ContractionFailed("momentum solver did not converge")
        return z + Pt

    def dz_momentum(self, z, q):
        """dP/dz from the implicit equation; >= 1/2 on the real slice."""
        P = self.momentum(z, q)
        rad = 1.0 + self.b(P, q)
        if np.any(rad <= 0.0):
            raise NegativeRadicand("1 + b has nonpositive values")
        denom = 1.0 + np.asarray(z, dtype=float) * self.dpn_b(P, q) / (2.0 * rad ** 1.5)
        return 1.0 / (np.sqrt(rad) * denom)

    # --- even auxiliaries ---

    def b_sharp(self, z, q):
        z = np.asarray(z, dtype=float)
        rp = 1.0 + self.b(self.momentum(z, q), q)
        rm = 1.0 + self.b(self.momentum(-z, q), q)
        if np.any(rp <= 0.0) or np.any(rm <= 0.0):
            raise NegativeRadicand("1 + b has nonpositive values")
        return 0.5 / np.sqrt(rp) + 0.5 / np.sqrt(rm) - 1.0

    def b_dag(self, v, q):
        v = np.maximum(np.asarray(v, dtype=float), 0.0)
        return self.b_sharp(np.sqrt(v), q)

    def b_tilde(self, v, q):
        """b_dag + 2 v d_v b_dag, via the even-in-z form near v = 0."""
        v = np.maximum(np.asarray(v, dtype=float), 0.0)
        q = np.asarray(q, dtype=float)
        h = np.maximum(1e-6, 1e-3 * v)
        out = np.empty(np.broadcast(v, q).shape)
        vb, qb = np.broadcast_arrays(v, q)
        hb = np.broadcast_to(h, vb.shape)
        big = vb >= hb
        if np.any(big):
            vv, qq, hh = vb[big], qb[big], hb[big]
            dv = (self.b_dag(vv + hh, qq) - self.b_dag(vv - hh, qq)) / (2.0 * hh)
            out[big] = self.b_dag(vv, qq) + 2.0 * vv * dv
        if np.any(~big):
            vv, qq = vb[~big], qb[~big]
            z = np.sqrt(vv)
            hz = np.maximum(1e-7, 1e-3 * z)
            dz = (self.b_sharp(z + hz, qq) - self.b_sharp(z - hz, qq)) / (2.0 * hz)
            out[~big] = self.b_sharp(z, qq) + z * dz
        return out if out.shape else float(out)


class StandardFormHooks:
    """Adapter exposing a slice to OneDSystem in translated coordinates."""

    has_b = True

    def __init__(self, sl: SFSlice, offset: float):
        self.sl = sl
        self.offset = offset

    def momentum(self, z, sigma):
        return self.sl.momentum(z, np.asarray(sigma) + self.offset)

    def dz_momentum(self, z, sigma):
        return self.sl.dz_momentum(z, np.asarray(sigma) + self.offset)

    def b_dag(self, v, sigma):
        return self.sl.b_dag(v, np.asarray(sigma) + self.offset)

    def b_tilde(self, v, sigma):
        return self.sl.b_tilde(v, np.asarray(sigma) + self.offset)


@dataclass(frozen=True)
class StandardFormSystem:
    """normalize() output: the perturbed Hamiltonian plus its bound ledger."""

    ph: PerturbedHamiltonian
    bounds: tuple            # (name, measured, bound, passed) entries at the checked p_hat
    p_hat_checked: tuple

    def slice(self, p_hat=None):
        return SFSlice(self.ph, p_hat)

    def bounds_report(self):
        return [{"name": n, "measured": m, "bound": b, "passed": p}
                for (n, m, b, p) in self.bounds]


def normalize(ph: PerturbedHamiltonian, p_hat=None, strict=True):
    """Build the standard form and verify the normalization bounds.

    Checks, on real grids at the given parameter point: the smallness
    hypothesis; the Pstar/a_star/b_star bounds; the Gm/b family of bounds;
    exactness of the composition identity; and the (p_n, q_n) slice
    symplecticity.  Raises BoundViolated on failure when strict.
    """
    eta0, r0, R0, s0 = ph.eta0, ph.r0, ph.R0, ph.s0
    if eta0 > (r0 ** 2 / 64.0) * min(s0 / math.pi, 1.0):
        raise BoundViolated("urea", f"eta0 = {eta0:.3e} exceeds (r0^2/64) min(s0/pi, 1)")
    sl = SFSlice(ph, p_hat)
    q = 2.0 * np.pi * np.arange(256) / 256

    checks = []

    def add(name, measured, bound):
        checks.append((name, float(measured), float(bound), bool(measured <= bound * (1 + 1e-12))))

    add("Pstar", abs(sl.Pstar), 2.0 * eta0 / r0)
    add("a_star", np.max(np.abs(sl.a_star.eval(q, 0))), 4.0 * eta0 / r0)

    # b_star = -d phi / d p_hat by centered differences in each parameter
    bstar_sup = 0.0
    if p_hat is not None and len(np.atleast_1d(p_hat)):
        p_arr = np.atleast_1d(np.asarray(p_hat, dtype=float))
        for j in range(p_arr.size):
            h = 1e-6 * max(1.0, abs(p_arr[j]))
            pp, pm = p_arr.copy(), p_arr.copy()
            pp[j] += h
            pm[j] -= h
            phi_p = SFSlice(ph, pp).phi.eval(q, 0)
            phi_m = SFSlice(ph, pm).phi.eval(q, 0)
            bstar_sup = max(bstar_sup, float(np.max(np.abs(phi_p - phi_m) / (2 * h))))
    add("b_star", bstar_sup, 16.0 * math.pi * eta0 / r0 ** 2)

    Fq = ph.base.eval(q, None if ph.base.n_params == 0 else p_hat, 0)
    add("Gm_minus_F", np.max(np.abs(sl.Gm.eval(q, 0) - Fq)), 2.0 * eta0)

    pn = np.linspace(-R0, R0, 41)
    PN, Q = np.meshgrid(pn, q[::8], indexing="ij")
    bv = sl.b(PN, Q)
    dbv = sl.dpn_b(PN, Q)
    add("b", np.max(np.abs(bv)), 32.0 * eta0 / r0 ** 2)
    add("dpn_b", np.max(np.abs(dbv)), 64.0 * eta0 / r0 ** 3)
    add("pn_b", np.max(np.abs(PN * bv)), 10.0 * eta0 / r0)
    add("pn_dpn_b", np.max(np.abs(PN * dbv)), 100.0 * eta0 / r0 ** 2)

    # composition identity on a 16 x 16 grid
    pn16 = np.linspace(-R0 + 1e-3, R0 - 1e-3, 16)
    q16 = 2.0 * np.pi * np.arange(16) / 16
    PN, Q = np.meshgrid(pn16, q16, indexing="ij")
    Pq = sl.P_series.eval(Q.ravel(), 0).reshape(Q.shape)
    Pbig = PN - sl.Pstar + Pq
    Hstar = ph.hamiltonian(p_hat, Pbig, Q)
    Hstd = (1.0 + sl.b(PN, Q)) * (PN - sl.Pstar) ** 2 + sl.Gm.eval(Q.ravel(), 0).reshape(Q.shape)
    comp = float(np.max(np.abs(Hstar - Hstd) / (1.0 + np.abs(Hstar))))
    add("composition", comp, 1e-10)

    # slice symplecticity: FD Jacobian determinant of (pn, qn) -> (Pn, Qn)
    hh = 1e-6

    def slice_map(pn_v, qn_v):
        return pn_v - sl.Pstar + sl.P_series.eval(qn_v, 0), qn_v

    pg = np.linspace(-R0 / 2, R0 / 2, 7)
    qg = 2.0 * np.pi * np.arange(7) / 7
    jac_dev = 0.0
    for pv in pg:
        for qv in qg:
            Pp, Qp = slice_map(pv + hh, qv)
            Pm, Qm = slice_map(pv - hh, qv)
            P_q_p, Q_q_p = slice_map(pv, qv + hh)
            P_q_m, Q_q_m = slice_map(pv, qv - hh)
            a11 = (Pp - Pm) / (2 * hh)
            a12 = (P_q_p - P_q_m) / (2 * hh)
            a21 = (Qp - Qm) / (2 * hh)
            a22 = (Q_q_p - Q_q_m) / (2 * hh)
            jac_dev = max(jac_dev, abs(a11 * a22 - a12 * a21 - 1.0))
    add("symplectic_slice", jac_dev, 1e-8)

    if strict:
        for name, measured, bound, passed in checks:
            if not passed:
                raise BoundViolated(name, f"measured {measured:.6e} > bound {bound:.6e}")
    return StandardFormSystem(ph=ph, bounds=tuple(checks),
                              p_hat_checked=tuple(np.atleast_1d(p_hat)) if p_hat is not None else ())


def solve_momentum(sfs, z, q, p_hat=None):
    """P(z, q_n, p_hat) of the momentum equation (spec-level wrapper)."""
    return sfs.slice(p_hat).momentum(z, q)


def build_b_sharp(sfs, z, q, p_hat=None):
    return sfs.slice(p_hat).b_sharp(z, q)


def build_b_dag(sfs, v, q, p_hat=None):
    return sfs.slice(p_hat).b_dag(v, q)


def tilde_b(sfs, v, q, p_hat=None):
    return sfs.slice(p_hat).b_tilde(v, q)


def standard_form_system(sfs, p_hat=None, R0=None, r0=None, quad_tol=1e-11):
    """OneDSystem for the normalized Hamiltonian at a parameter point."""
    ph = sfs.ph if isinstance(sfs, StandardFormSystem) else sfs
    sl = ph and (sfs.slice(p_hat) if isinstance(sfs, StandardFormSystem) else SFSlice(ph, p_hat))
    base_md = morse_check(ph.base, None if ph.base.n_params == 0 else p_hat)
    q = 2.0 * np.pi * np.arange(1024) / 1024
    Fq = ph.base.eval(q, None if ph.base.n_params == 0 else p_hat, 0)
    eta_cont = float(np.max(np.abs(sl.Gm.eval(q, 0) - Fq)))
    series = sl.Gm.translated(base_md.offset)
    from .morse import continue_critical_series

    cont = continue_critical_series(series, base_md, eta=eta_cont if eta_cont > 0 else None)
    hooks = StandardFormHooks(sl, base_md.offset)
    return OneDSystem(series, base_md, cont,
                      R0=R0 if R0 is not None else ph.R0,
                      r0=r0 if r0 is not None else ph.r0,
                      hooks=hooks, quad_tol=quad_tol)
