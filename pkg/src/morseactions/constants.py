"""Quantitative constants derived from (M, beta, s0, r0).

All thresholds are polynomial/exponential expressions whose values collapse
below float64 range for typical inputs (powers like 2^-214 appear), so each
one is evaluated in log2 space; ``value`` is the float64 image (0.0 on
underflow) and ``log2`` the exact exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


LOG2E = math.log2(math.e)


def _ldexp_safe(log2_value):
    if log2_value < -1070:
        return 0.0
    if log2_value > 1020:
        return math.inf
    return 2.0 ** log2_value


@dataclass(frozen=True)
class LogValue:
    """A positive quantity carried as log2(x) alongside its float image."""

    log2: float

    @property
    def value(self):
        return _ldexp_safe(self.log2)

    def __float__(self):
        return self.value

    def __le__(self, other):
        return self.log2 <= _log2_of(other)

    def __ge__(self, other):
        return self.log2 >= _log2_of(other)

    @staticmethod
    def of(x):
        return LogValue(_log2_of(x))


def _log2_of(x):
    if isinstance(x, LogValue):
        return x.log2
    x = float(x)
    if x <= 0.0:
        return -math.inf
    return math.log2(x)


def _lmin(*vals):
    return min(vals)


@dataclass(frozen=True)
class PaperConstants:
    """Derived constants for a Morse non-degenerate potential.

    theta_star, theta_sharp are ordinary floats; the tiny thresholds are
    LogValue instances.
    """

    M: float
    beta: float
    s0: float
    r0: float

    # --- plain geometric scales ---

    @property
    def theta_star(self):
        return math.sqrt(self.beta * self.s0 ** 3 / (3.0 * self.M))

    @property
    def theta_sharp(self):
        return self.beta * self.s0 ** 3 / (6.0 * self.M)

    @property
    def s_star(self):
        return min(self.s0, 1.0)

    # --- log-space thresholds ---

    def _l(self):
        return (math.log2(self.M), math.log2(self.beta),
                math.log2(self.s0), math.log2(self.r0))

    @property
    def eta_diamond(self):
        """Admissible perturbation size threshold."""
        lM, lb, ls, lr = self._l()
        tail = _lmin(2 * lr, 3 * lr - 0.5 * lM, 45 * lb + 75 * ls - 321 - 44 * lM)
        return LogValue(9 * lb + 15 * ls - 120 - 9 * lM + tail)

    @property
    def r_star(self):
        """Radius of analyticity of dI/dE around a well bottom."""
        lM, lb, ls, lr = self._l()
        return LogValue(_lmin(18 * ls - 77 + 12 * lb - 11 * lM, 2 * lr - 8))

    @property
    def r2(self):
        """z-radius of the log decomposition at odd-region upper edges."""
        lM, lb, ls, lr = self._l()
        return LogValue(_lmin(49 * ls + 30 * lb - 214 - 30 * lM, 2 * lr - 10 - lM))

    @property
    def r3(self):
        """z-radius of the log decomposition at even-region lower edges."""
        lM, lb, ls, lr = self._l()
        return LogValue(_lmin(6 * ls + 3 * lb - 25 - 3 * lM, 2 * lr - 8 - lM))

    @property
    def r4(self):
        """Energy margin r2 * M / 2^5."""
        return LogValue(self.r2.log2 + math.log2(self.M) - 5)

    def lower_bound_oscillatory(self):
        """Floor of dI/dE on the oscillatory regions: sqrt(beta) s0^{3/2} / 64 M."""
        return math.sqrt(self.beta) * self.s0 ** 1.5 / (64.0 * self.M)

    def lower_bound_rotational(self, E):
        """Floor of |dI/dE| on rotational regions at energy E."""
        return 1.0 / (4.0 * math.sqrt(E + 1.5 * self.M))

    def psi_floor_oscillatory(self):
        """Floor of |psi(0)| at maxima sides of odd regions: s0 / 32 sqrt(M)."""
        return self.s0 / (32.0 * math.sqrt(self.M))

    def psi_floor_rotational(self):
        """Floor of |psi(0)| for the flanking pair at a maximum: s0 / 4 sqrt(M)."""
        return self.s0 / (4.0 * math.sqrt(self.M))

    def bottom_deriv_bound(self):
        """Bound on |dI/dE| near a well bottom: 16 sqrt(M) / (s0 beta)."""
        return 16.0 * math.sqrt(self.M) / (self.s0 * self.beta)

    def as_dict(self):
        return {
            "M": self.M,
            "beta": self.beta,
            "s0": self.s0,
            "r0": self.r0,
            "theta_star": self.theta_star,
            "theta_sharp": self.theta_sharp,
            "eta_diamond": self.eta_diamond.value,
            "log2_eta_diamond": self.eta_diamond.log2,
            "r_star": self.r_star.value,
            "log2_r_star": self.r_star.log2,
            "r2": self.r2.value,
            "log2_r2": self.r2.log2,
            "r3": self.r3.value,
            "log2_r3": self.r3.log2,
            "r4": self.r4.value,
            "log2_r4": self.r4.log2,
            "dIdE_floor_oscillatory": self.lower_bound_oscillatory(),
            "psi_floor_oscillatory": self.psi_floor_oscillatory(),
            "psi_floor_rotational": self.psi_floor_rotational(),
        }


def cosine_like_r2_star(eta, s0, r0):
    """r2 specialized to a (2 eta e^{s0}, eta/4, s0) Morse function."""
    ls, lr, le = math.log2(s0), math.log2(r0), math.log2(eta)
    return LogValue(_lmin(49 * ls - 304 - 30 * s0 * LOG2E,
                          2 * lr - 11 - le - s0 * LOG2E))


def cosine_like_threshold(eta, s0, r0):
    """Distance threshold below which a potential counts as (-eta)-cosine-like."""
    r2s = cosine_like_r2_star(eta, s0, r0)
    ls = math.log2(s0)
    lss = math.log2(min(s0, 1.0))
    return LogValue(13.5 * ls + 4 * r2s.log2 + math.log2(eta)
                    - 135 - 12 * lss - 6 * s0 * LOG2E)


def rosetta_well_bound(pc: PaperConstants, eta):
    """log2 of the explicit closeness bound for dI/dE on odd regions.

    Evaluated at the smallest admissible interior margin; the bound is
    astronomically loose at desk scale, which is the point of reporting it.
    """
    lM, lb, ls, lr = (math.log2(pc.M), math.log2(pc.beta),
                      math.log2(pc.s0), math.log2(pc.r0))
    leta = _log2_of(eta)
    lss = math.log2(pc.s_star)
    # admissible lower limit for the interior margin
    ltilde = max(5 + lM + leta - lb - 2 * lss, pc.r4.log2)
    t1 = 78 + 7 * lM - 12 * ls - 7 * lb - 1.5 * pc.r2.log2
    t2 = 12 * lss + lM - ltilde
    lead = 22 + 0.5 * lM - 2 * lb - ls + leta
    return max(t1, t2) + 1 + lead  # max*2 >= t1+t2 >= max: off by <=1 bit, kept safe


__all__ = [
    "LogValue",
    "PaperConstants",
    "cosine_like_r2_star",
    "cosine_like_threshold",
    "rosetta_well_bound",
]
