"""Fractional powers with an explicitly chosen branch.

A BranchSpec pins the argument of the input to a window of width at most
2*pi; the argument of z is then determined continuously inside that window
and the power e*arg(z) is used for the output.  XI_BRANCH is the cut plane
-3*pi/2 < arg xi < pi/2 used for the Borel variable, which keeps
t = C*xi^(1/2) in the right half-plane.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf, mpc, pi


class BranchError(ValueError):
    """Argument outside the declared branch window."""


@dataclass(frozen=True)
class BranchSpec:
    arg_lo: mpf
    arg_hi: mpf

    def __post_init__(self):
        object.__setattr__(self, "arg_lo", mpf(self.arg_lo))
        object.__setattr__(self, "arg_hi", mpf(self.arg_hi))
        if self.arg_hi <= self.arg_lo:
            raise ValueError("empty argument window")

    def normalize_arg(self, z) -> mpf:
        """Representative of arg z inside [arg_lo, arg_hi]."""
        if z == 0:
            raise BranchError("argument of zero is undefined")
        a = mpmath.arg(mpc(z))
        two_pi = 2 * pi
        # tolerate endpoint roundoff by one ulp-scale margin
        tol = mpf(2) ** (-mpmath.mp.prec + 8)
        hits = [a + k * two_pi for k in range(-2, 3)
                if self.arg_lo - tol <= a + k * two_pi <= self.arg_hi + tol]
        if hits:
            # a full-turn window can match both endpoints; the upper edge
            # belongs to the sheet
            return max(hits)
        raise BranchError("argument %s outside branch window (%s, %s)"
                          % (a, self.arg_lo, self.arg_hi))


def xi_branch() -> BranchSpec:
    """The Borel-plane cut: -3*pi/2 < arg xi < pi/2."""
    return BranchSpec(-3 * pi / 2, pi / 2)


def tau_branch() -> BranchSpec:
    """Upper half-plane tau with 0 < arg tau < pi."""
    return BranchSpec(mpf(0), pi)


def frac_pow(z, e, spec: BranchSpec) -> mpc:
    """z**e with arg z resolved inside spec; e may be a Fraction or real."""
    if z == 0:
        ef = mpf(Fraction(e).numerator) / Fraction(e).denominator if isinstance(e, (Fraction, int)) else mpf(e)
        if ef < 0:
            raise BranchError("zero to a negative power")
        return mpc(0) if ef > 0 else mpc(1)
    a = spec.normalize_arg(z)
    if isinstance(e, Fraction):
        ef = mpf(e.numerator) / e.denominator
    else:
        ef = mpf(e)
    r = mpmath.log(abs(mpc(z)))
    return mpmath.exp(ef * mpc(r, a))


def power_tau_over_i(tau, e, arg_tau=None) -> mpc:
    """(tau/i)**e with arg(tau) taken in (0, pi) unless given explicitly.

    With arg tau in (0, pi), tau/i lies in the right half-plane and the
    principal power is continuous there; an explicit arg_tau extends the
    same continuous determination outside the upper half-plane.
    """
    tau = mpc(tau)
    principal = mpmath.arg(tau)
    if arg_tau is None:
        arg_tau = principal
    else:
        # arg_tau only selects the sheet; the argument itself is computed at
        # working precision so a low-precision hint costs no accuracy
        turns = int(mpmath.nint((mpf(arg_tau) - principal) / (2 * pi)))
        arg_tau = principal + 2 * turns * pi
    arg_u = mpf(arg_tau) - pi / 2
    if isinstance(e, Fraction):
        ef = mpf(e.numerator) / e.denominator
    else:
        ef = mpf(e)
    r = mpmath.log(abs(tau))
    return mpmath.exp(ef * mpc(r, arg_u))
