"""Parameter-dependent real-analytic 2*pi-periodic potentials.

A potential is a finite Fourier series

    F(theta, p) = sum_{k=1..K} a_k(p) cos(k theta) + b_k(p) sin(k theta)

with zero mean and coefficients that are real polynomials in a parameter
vector p confined to a box.  Everything downstream (Morse analysis, action
integrals) works on the 1D slice at a fixed parameter value, represented by
:class:`TrigSeries`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParamOutOfBox, WidthExceedsAnalyticity


class ParamPolynomial:
    """Real polynomial in m variables stored as a dense coefficient tensor.

    ``coeffs`` has shape (d1+1, ..., dm+1); the entry at multi-index
    (i1..im) multiplies x1^i1 * ... * xm^im.  For m = 0 the tensor is a
    scalar (a constant polynomial).
    """

    def __init__(self, coeffs, n_vars=None):
        arr = np.asarray(coeffs, dtype=float)
        if n_vars is not None and arr.ndim != n_vars:
            # allow a flat [c] constant for any n_vars
            if arr.size == 1:
                arr = np.full((1,) * n_vars, float(arr.reshape(-1)[0])) if n_vars else arr.reshape(())
            else:
                raise ValueError(f"expected {n_vars} polynomial axes, got shape {arr.shape}")
        self.coeffs = arr

    @property
    def n_vars(self):
        return self.coeffs.ndim

    def __call__(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.size != self.n_vars:
            raise ValueError(f"polynomial in {self.n_vars} vars evaluated at {x.size}-vector")
        return _horner(self.coeffs, x)

    def derivative(self, axis):
        """d/dx_axis as a new ParamPolynomial."""
        c = self.coeffs
        n = c.shape[axis]
        if n == 1:
            return ParamPolynomial(np.zeros_like(np.take(c, [0], axis=axis)))
        idx = np.arange(1, n)
        sl = [slice(None)] * c.ndim
        sl[axis] = idx
        d = c[tuple(sl)] * idx.reshape([-1 if a == axis else 1 for a in range(c.ndim)])
        return ParamPolynomial(d)

    def interval_bound(self, box):
        """Upper bound of |p| over the box via interval Horner."""
        lo, hi = _interval_horner(self.coeffs, np.asarray(box, dtype=float))
        return max(abs(lo), abs(hi))

    def collapse_last(self, prefix):
        """Fix all variables but the last; 1D coefficient array in the last."""
        c = self.coeffs
        if c.ndim == 0:
            return np.array([float(c)])
        prefix = np.atleast_1d(np.asarray(prefix, dtype=float))
        if prefix.size != c.ndim - 1:
            raise ValueError(f"need {c.ndim - 1} prefix values, got {prefix.size}")
        for x in prefix:
            acc = c[-1]
            for i in range(c.shape[0] - 2, -1, -1):
                acc = acc * x + c[i]
            c = np.asarray(acc)
        return np.atleast_1d(c)

    def to_nested_list(self):
        return self.coeffs.tolist()


def _horner(c, x):
    if c.ndim == 0:
        return float(c)
    acc = c[-1]
    for i in range(c.shape[0] - 2, -1, -1):
        acc = acc * x[0] + c[i]
    if np.ndim(acc) == 0:
        return float(acc)
    return _horner(np.asarray(acc), x[1:])


def _interval_mul(a, b):
    prods = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
    return (min(prods), max(prods))


def _interval_add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _interval_horner(c, box):
    if c.ndim == 0:
        v = float(c)
        return (v, v)
    x = (box[0][0], box[0][1])
    acc = _interval_horner(c[-1], box[1:])
    for i in range(c.shape[0] - 2, -1, -1):
        lo, hi = _interval_horner(c[i], box[1:])
        acc = _interval_add(_interval_mul(acc, x), (lo, hi))
    return acc


@dataclass(frozen=True)
class FourierPotential:
    """Finite Fourier series with polynomial parameter dependence.

    Attributes:
        K: maximal harmonic index (harmonics k = 1..K; no k = 0 term).
        cos_polys, sin_polys: length-K lists of ParamPolynomial coefficients.
        s0: analyticity half-width of the angular strip.
        param_box: (m, 2) array of [lo, hi] per parameter.
    """

    K: int
    cos_polys: tuple
    sin_polys: tuple
    s0: float
    param_box: tuple = field(default=())

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if len(self.cos_polys) != self.K or len(self.sin_polys) != self.K:
            raise ValueError("need exactly K cosine and K sine coefficient polynomials")
        if self.s0 <= 0:
            raise ValueError("s0 must be positive")

    @property
    def n_params(self):
        return len(self.param_box)

    def check_params(self, p_hat):
        p = np.atleast_1d(np.asarray(p_hat, dtype=float)) if p_hat is not None else np.zeros(0)
        if p.size != self.n_params:
            raise ParamOutOfBox(f"expected {self.n_params} parameters, got {p.size}")
        for j, (lo, hi) in enumerate(self.param_box):
            if not (lo <= p[j] <= hi):
                raise ParamOutOfBox(f"parameter {j} = {p[j]} outside [{lo}, {hi}]")
        return p

    def coeffs_at(self, p_hat):
        """(a, b) harmonic coefficient arrays at a parameter point."""
        p = self.check_params(p_hat)
        a = np.array([poly(p) for poly in self.cos_polys])
        b = np.array([poly(p) for poly in self.sin_polys])
        return a, b

    def eval(self, theta, p_hat=None, order=0):
        """Value or theta-derivative (order 0..3) at angle(s) theta."""
        if not 0 <= order <= 3:
            raise ValueError("order must be in 0..3")
        a, b = self.coeffs_at(p_hat)
        return TrigSeries(a, b).eval(theta, order)

    def series_at(self, p_hat=None):
        a, b = self.coeffs_at(p_hat)
        return TrigSeries(a, b)


def evaluate(pot, theta, p_hat=None, order=0):
    """Free-function form of :meth:`FourierPotential.eval`."""
    return pot.eval(theta, p_hat, order)


def sup_fourier_norm(pot, s, p_hat=None):
    """Width-weighted coefficient norm  max_k |f_k| e^{k s}.

    With ``p_hat`` given the coefficients are evaluated exactly there; with
    ``p_hat=None`` each |f_k| is replaced by its interval bound over the
    parameter box (exact at box corners for coefficients of degree <= 1).
    """
    if s < 0 or s > pot.s0:
        raise WidthExceedsAnalyticity(f"s = {s} not in [0, s0 = {pot.s0}]")
    if p_hat is not None:
        a, b = pot.coeffs_at(p_hat)
        mags = 0.5 * np.hypot(a, b)
    else:
        box = np.asarray(pot.param_box, dtype=float)
        mags = np.array(
            [0.5 * np.hypot(ca.interval_bound(box), sa.interval_bound(box))
             for ca, sa in zip(pot.cos_polys, pot.sin_polys)]
        )
    k = np.arange(1, pot.K + 1)
    return float(np.max(mags * np.exp(k * s)))


def strip_sup_bound(pot, s, p_hat=None):
    """Upper bound for sup over the complex strip |Im theta| < s of |F|.

    Per-harmonic tight:  sum_k sqrt(a_k^2 + b_k^2) * cosh(k s); exact for a
    single harmonic (e.g. equals cosh(s) for -cos).
    """
    if s < 0 or s > pot.s0:
        raise WidthExceedsAnalyticity(f"s = {s} not in [0, s0 = {pot.s0}]")
    if p_hat is not None:
        a, b = pot.coeffs_at(p_hat)
        r = np.hypot(a, b)
    else:
        box = np.asarray(pot.param_box, dtype=float)
        r = np.array(
            [np.hypot(ca.interval_bound(box), sa.interval_bound(box))
             for ca, sa in zip(pot.cos_polys, pot.sin_polys)]
        )
    k = np.arange(1, pot.K + 1)
    return float(np.sum(r * np.cosh(k * s)))


def sup_fourier_distance(pot_a_series, pot_b_series, s):
    """max_k |f_k(A) - f_k(B)| e^{k s} between two fixed-parameter series."""
    K = max(pot_a_series.K, pot_b_series.K)
    a1, b1 = pot_a_series.padded(K)
    a2, b2 = pot_b_series.padded(K)
    mags = 0.5 * np.hypot(a1 - a2, b1 - b2)
    k = np.arange(1, K + 1)
    d0 = abs(pot_a_series.c0 - pot_b_series.c0)
    return float(max(d0, np.max(mags * np.exp(k * s))))


class TrigSeries:
    """Fixed-parameter trigonometric polynomial c0 + sum a_k cos + b_k sin."""

    def __init__(self, a, b, c0=0.0):
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.c0 = float(c0)
        self.K = len(self.a)
        self._k = np.arange(1, self.K + 1, dtype=float)

    def padded(self, K):
        a = np.zeros(K)
        b = np.zeros(K)
        a[: self.K] = self.a
        b[: self.K] = self.b
        return a, b

    def eval(self, theta, order=0):
        th = np.asarray(theta, dtype=float)
        scalar = th.ndim == 0
        shape = th.shape
        th = np.atleast_1d(th).ravel()
        kth = np.outer(th, self._k)
        c, s = np.cos(kth), np.sin(kth)
        kpow = self._k ** order
        if order == 0:
            out = c @ self.a + s @ self.b + self.c0
        elif order == 1:
            out = s @ (-self._k * self.a) + c @ (self._k * self.b)
        elif order == 2:
            out = c @ (-kpow * self.a) + s @ (-kpow * self.b)
        elif order == 3:
            out = s @ (kpow * self.a) + c @ (-kpow * self.b)
        else:
            raise ValueError("order must be in 0..3")
        return float(out[0]) if scalar else out.reshape(shape)

    def translated(self, offset):
        """Series of theta -> f(theta + offset); exact coefficient rotation."""
        ko = self._k * offset
        c, s = np.cos(ko), np.sin(ko)
        return TrigSeries(self.a * c + self.b * s, -self.a * s + self.b * c, self.c0)

    def centered(self, sigma_c):
        return CenteredSeries(self, sigma_c)

    @staticmethod
    def from_samples(values):
        """Series interpolating uniform periodic samples on [0, 2*pi)."""
        v = np.asarray(values, dtype=float)
        n = v.size
        F = np.fft.rfft(v) / n
        c0 = float(F[0].real)
        a = 2.0 * F[1:].real
        b = -2.0 * F[1:].imag
        if n % 2 == 0:
            a[-1] *= 0.5  # Nyquist mode appears once
        return TrigSeries(a, b, c0)


def _sin_minus_x(x):
    """sin(x) - x without cancellation."""
    x = np.asarray(x, dtype=float)
    out = np.where(np.abs(x) > 0.5, np.sin(x) - x, 0.0)
    small = np.abs(x) <= 0.5
    if np.any(small):
        xs = x[small] if x.ndim else x
        term = -xs ** 3 / 6.0
        acc = term.copy()
        for m in range(5, 23, 2):
            term = term * (-xs ** 2) / (m * (m - 1))
            acc += term
        if x.ndim:
            out[small] = acc
        else:
            out = acc
    return out


class CenteredSeries:
    """Cancellation-free evaluation of f around a reference angle.

    delta(u) = f(sigma_c + u) - f(sigma_c) and dvalue(u) = f'(sigma_c + u)
    are computed from rotated coefficients using cos(ku)-1 = -2 sin^2(ku/2)
    and a series for sin(ku)-ku, so both keep full relative accuracy down to
    |u| ~ 1e-13 even when f(sigma_c) is O(1).
    """

    def __init__(self, series, sigma_c):
        k = series._k
        ks = k * sigma_c
        cs, sn = np.cos(ks), np.sin(ks)
        self.k = k
        self.c = series.a * cs + series.b * sn       # cos(ku) coefficients
        self.d = -series.a * sn + series.b * cs      # sin(ku) coefficients
        self.sigma_c = sigma_c
        self.g1 = float(np.sum(k * self.d))          # f'(sigma_c)
        self.g2 = float(-np.sum(k ** 2 * self.c))    # f''(sigma_c)
        self.g3 = float(-np.sum(k ** 3 * self.d))    # f'''(sigma_c)

    def delta(self, u):
        u = np.asarray(u, dtype=float)
        ku = np.multiply.outer(u, self.k)
        cm1 = -2.0 * np.sin(ku / 2.0) ** 2
        smx = _sin_minus_x(ku)
        out = cm1 @ self.c + smx @ self.d + u * self.g1
        return out if out.ndim else float(out)

    def dvalue(self, u):
        u = np.asarray(u, dtype=float)
        ku = np.multiply.outer(u, self.k)
        cm1 = -2.0 * np.sin(ku / 2.0) ** 2
        out = np.sin(ku) @ (-self.k * self.c) + cm1 @ (self.k * self.d) + self.g1
        return out if out.ndim else float(out)

    def d2value(self, u):
        u = np.asarray(u, dtype=float)
        ku = np.multiply.outer(u, self.k)
        out = np.cos(ku) @ (-self.k ** 2 * self.c) + np.sin(ku) @ (-self.k ** 2 * self.d)
        return out if out.ndim else float(out)


def make_potential(K=None, cos=None, sin=None, s0=1.0, param_box=(), n_params=None):
    """Convenience constructor from nested coefficient lists.

    ``cos``/``sin`` are per-harmonic polynomial coefficient arrays; plain
    floats are accepted for parameter-free potentials.
    """
    m = len(param_box) if n_params is None else n_params
    cos = cos or []
    sin = sin or []
    K = K if K is not None else max(len(cos), len(sin))
    cp, sp = [], []
    for k in range(K):
        ck = cos[k] if k < len(cos) else 0.0
        sk = sin[k] if k < len(sin) else 0.0
        cp.append(_as_poly(ck, m))
        sp.append(_as_poly(sk, m))
    return FourierPotential(K=K, cos_polys=tuple(cp), sin_polys=tuple(sp),
                            s0=float(s0), param_box=tuple(tuple(map(float, r)) for r in param_box))


def _as_poly(spec, m):
    if isinstance(spec, ParamPolynomial):
        return spec
    arr = np.asarray(spec, dtype=float)
    if arr.ndim == 0:
        return ParamPolynomial(np.full((1,) * m, float(arr)) if m else arr)
    return ParamPolynomial(arr, n_vars=m)


def pendulum_potential(eta=1.0, s0=1.0, param_box=()):
    """F(theta) = -eta * cos(theta)."""
    return make_potential(cos=[-float(eta)], s0=s0, param_box=param_box)
