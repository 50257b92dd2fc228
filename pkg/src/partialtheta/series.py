"""Truncated series with a rational leading-exponent offset.

A TruncatedSeries represents sum_{j=0..P} coeffs[j] * x^(offset+j) plus an
unknown error of order x^(offset+P+1).  The rational offset lets the same
type carry ordinary power series, Laurent tails and Puiseux factors such as
xi^(-1/2) * (analytic).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mpc, mpf


class SeriesError(ValueError):
    """Incompatible offsets or invalid composition operands."""


def _as_frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class TruncatedSeries:
    offset: Fraction
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "offset", _as_frac(self.offset))
        object.__setattr__(self, "coeffs", tuple(mpc(c) for c in self.coeffs))
        if len(self.coeffs) == 0:
            raise SeriesError("series needs at least one coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def top_exponent(self) -> Fraction:
        return self.offset + self.order

    def coeff_at(self, exponent) -> mpc:
        """Coefficient of x^exponent (0 when the slot is absent but known)."""
        e = _as_frac(exponent)
        j = e - self.offset
        if j.denominator != 1:
            return mpc(0)
        j = int(j)
        if j < 0:
            return mpc(0)
        if j > self.order:
            raise SeriesError("exponent beyond truncation order")
        return self.coeffs[j]

    def eval_at(self, x) -> mpc:
        """Horner evaluation; fractional offsets use the principal power."""
        acc = mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        if self.offset != 0:
            e = mpf(self.offset.numerator) / self.offset.denominator
            acc = acc * mpc(x) ** e
        return acc


def series_zero(offset=Fraction(0), order: int = 0) -> TruncatedSeries:
    return TruncatedSeries(offset, (0,) * (order + 1))


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    shift = b.offset - a.offset
    if shift.denominator != 1:
        raise SeriesError("offsets differ by a non-integer")
    off = min(a.offset, b.offset)
    top = min(a.top_exponent, b.top_exponent)
    if top < off:
        raise SeriesError("series ranges do not overlap")
    n = int(top - off) + 1
    out = [mpc(0)] * n
    for s in (a, b):
        base = int(s.offset - off)
        for j, c in enumerate(s.coeffs):
            if base + j < n:
                out[base + j] += c
    return TruncatedSeries(off, out)


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    n = min(a.order, b.order) + 1
    out = [mpc(0)] * n
    for i, ca in enumerate(a.coeffs[:n]):
        if ca == 0:
            continue
        for j in range(n - i):
            out[i + j] += ca * b.coeffs[j]
    return TruncatedSeries(a.offset + b.offset, out)


def series_scale(a: TruncatedSeries, s) -> TruncatedSeries:
    return TruncatedSeries(a.offset, tuple(c * s for c in a.coeffs))


def _poly_mul(pa, pb, nmax):
    out = [mpc(0)] * min(nmax, len(pa) + len(pb) - 1)
    for i, ca in enumerate(pa):
        if ca == 0 or i >= len(out):
            continue
        for j, cb in enumerate(pb):
            if i + j >= len(out):
                break
            out[i + j] += ca * cb
    return out


def series_compose(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """a(b(x)) truncated at the smallest order either operand supports."""
    if a.offset.denominator != 1 or a.offset < 0:
        raise SeriesError("outer series must have a nonnegative integer offset")
    if b.offset.denominator != 1 or b.offset < 0:
        raise SeriesError("inner series must have integer offset")
    if b.offset == 0:
        if b.coeffs[0] != 0:
            raise SeriesError("inner series must have zero constant term")
        if b.order == 0:
            raise SeriesError("inner series must have valuation >= 1")
        b = TruncatedSeries(Fraction(1), b.coeffs[1:])
    ob = int(b.offset)
    oa = int(a.offset)
    # known exponent range of the result
    t1 = ob * (oa + a.order + 1)           # error from truncating a
    t2 = ob + b.order + 1 if a.order + oa >= 1 else t1  # error from truncating b
    top = min(t1, t2) - 1
    n = top + 1
    pb = [mpc(0)] * ob + list(b.coeffs)
    acc = [mpc(0)] * n
    for c in reversed(a.coeffs):
        acc = _poly_mul(acc, pb, n)
        if acc:
            acc[0] = acc[0] + c
        else:
            acc = [mpc(c)]
    # multiply by b^oa for the offset part of a
    for _ in range(oa):
        acc = _poly_mul(acc, pb, n)
    acc += [mpc(0)] * (n - len(acc))
    return TruncatedSeries(Fraction(0), acc)


def series_reversion(b: TruncatedSeries, P: int) -> TruncatedSeries:
    """Compositional inverse of b = b1*x + b2*x^2 + ..., to order P.

    Returns c with b(c(x)) = x + O(x^(P+1)); requires b1 != 0.
    """
    if b.offset == 0:
        if b.coeffs[0] != 0:
            raise SeriesError("reversion needs zero constant term")
        lin = list(b.coeffs[1:])
    elif b.offset == 1:
        lin = list(b.coeffs)
    else:
        raise SeriesError("reversion needs a series of valuation 1")
    if not lin or lin[0] == 0:
        raise SeriesError("reversion needs nonzero linear coefficient")
    if P < 1:
        raise SeriesError("order must be >= 1")
    bcf = [mpc(0)] + lin[:P] + [mpc(0)] * max(0, P - len(lin))
    b1 = bcf[1]
    c = [mpc(0), 1 / b1]
    for k in range(2, P + 1):
        # coefficient of x^k in b(c_<k) where c_<k has c_k slot set to 0
        comp = [mpc(0)] * (k + 1)
        pw = [mpc(1)]
        for m in range(1, k + 1):
            pw = _poly_mul(pw, c + [mpc(0)], k + 1)
            pw += [mpc(0)] * (k + 1 - len(pw))
            if m < len(bcf) and bcf[m] != 0:
                for idx in range(k + 1):
                    comp[idx] += bcf[m] * pw[idx]
        c.append(-comp[k] / b1)
    return TruncatedSeries(Fraction(0), c)
