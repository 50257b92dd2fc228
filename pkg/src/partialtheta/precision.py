"""Precision contexts and conversions between mpmath and gmpy2 scalars.

All public results of the library are mpmath numbers; gmpy2 is used
internally in evaluation hot loops because its scalar operations are
several times faster at equal mantissa size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import mpmath
from mpmath import mpf, mpc

DEFAULT_BITS = 256
DEFAULT_TARGET = "1e-30"


class NonConvergent(ArithmeticError):
    """A numerical routine could not reach the requested accuracy."""


@dataclass(frozen=True)
class PrecisionContext:
    """Working mantissa precision plus the requested absolute error."""

    bits: int = DEFAULT_BITS
    target_abs_error: mpf = field(default=None)

    def __post_init__(self):
        if self.bits < 64:
            raise ValueError("bits must be >= 64")
        tgt = self.target_abs_error
        if tgt is None:
            tgt = DEFAULT_TARGET
        with mpmath.workprec(max(self.bits, 64)):
            tgt = mpf(tgt)
        if not tgt > 0:
            raise ValueError("target_abs_error must be > 0")
        object.__setattr__(self, "target_abs_error", tgt)

    @property
    def dps(self) -> int:
        return int(self.bits * 0.30103) + 2

    def workprec(self):
        """Context manager setting mpmath's precision to self.bits."""
        return mpmath.workprec(self.bits)

    def with_bits(self, bits: int) -> "PrecisionContext":
        return PrecisionContext(bits=bits, target_abs_error=self.target_abs_error)


DEFAULT_CTX = PrecisionContext()


def to_g(x, prec: int):
    """Convert an mpmath mpf/mpc (or int/Fraction) to gmpy2 at prec bits."""
    ctx = gmpy2.context(precision=prec)
    if isinstance(x, mpc):
        return gmpy2.mpc(_mpf_to_mpfr(x.real, ctx), _mpf_to_mpfr(x.imag, ctx), precision=prec)
    if isinstance(x, mpf):
        return _mpf_to_mpfr(x, ctx)
    if isinstance(x, Fraction):
        return gmpy2.mpfr(gmpy2.mpq(x.numerator, x.denominator), prec)
    if isinstance(x, complex):
        return gmpy2.mpc(x, precision=prec)
    return gmpy2.mpfr(x, prec)


def _mpf_to_mpfr(x: mpf, gctx):
    sign, man, exp, bc = x._mpf_
    if man == 0:
        if bc == -1:  # inf/nan encodings
            return gmpy2.mpfr(float(x))
        return gmpy2.mpfr(0)
    with gctx:
        r = gmpy2.mul_2exp(gmpy2.mpfr(man, gctx.precision), exp)
        return -r if sign else r


def to_m(z):
    """Convert a gmpy2 mpfr/mpc back to mpmath exactly."""
    if isinstance(z, gmpy2.mpc):
        re, im = to_m(z.real), to_m(z.imag)
        out = mpc(0)
        out._mpc_ = (re._mpf_, im._mpf_)
        return out
    if z == 0:
        return mpf(0)
    if not gmpy2.is_finite(z):
        return mpf(float(z))
    man, exp = z.as_mantissa_exp()
    man = int(man)
    with mpmath.workprec(max(man.bit_length(), 53)):
        return mpmath.ldexp(mpf(man), int(exp))


def mp_str(x, ctx: PrecisionContext = DEFAULT_CTX) -> str:
    """Decimal string carrying the full precision of the context."""
    with mpmath.workprec(ctx.bits):
        return mpmath.nstr(mpf(x) if not isinstance(x, (mpf, mpc)) else x,
                           ctx.dps, strip_zeros=False)
