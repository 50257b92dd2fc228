"""Direct evaluation of Theta(tau; nu, f, M) and its asymptotic series.

Theta(tau) = sum_{n>=1} n^nu f(n) e^{i pi n^2 tau / M} converges on the
upper half-plane; the truncation index is chosen from an explicit geometric
majorant of the tail.  The divergent expansion at 0 is
Theta~(tau) = sum_p L(-2p-nu, f) (pi i / M)^p tau^p / p!.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import mpmath
from mpmath import mpf, mpc

from .precision import PrecisionContext, DEFAULT_CTX, NonConvergent, to_g, to_m
from .periodic import (PeriodicFunction, VALUE_BITS, mean, twist_beta,
                       parity_split)
from .genfun import build, laurent_at_zero
from .series import TruncatedSeries, series_compose, series_reversion

MAX_TERMS = 10 ** 7
QBAR_TOL = "1e-20"
QBAR_INDETERMINATE = "1e-10"


class IndeterminateMembership(ArithmeticError):
    """Twisted mean magnitude falls in the undecidable band."""


@dataclass(frozen=True)
class ThetaSpec:
    nu: int
    f: PeriodicFunction

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError("nu must be >= 0")

    @property
    def period(self) -> int:
        return self.f.period


def truncation_index(spec: ThetaSpec, y, ctx: PrecisionContext) -> int:
    """Minimal N with ||f||_inf N^nu e^{-pi N^2 y/M} / (1-e^{-pi N y/M}) < target."""
    M = spec.period
    nu = spec.nu
    sup = float(spec.f.sup_norm)
    if sup == 0:
        return 0
    y = float(y)
    if y <= 0:
        raise ValueError("Im tau must be > 0")
    log_target = float(mpmath.log(ctx.target_abs_error))
    a = math.pi * y / M

    def log_bound(N):
        if N * a > 700:
            den = 0.0
        else:
            den = -math.log1p(-math.exp(-N * a))
        return math.log(sup) + nu * math.log(N) - a * N * N + den

    N = 1
    while N <= MAX_TERMS and log_bound(N) >= log_target:
        N *= 2
    if N > MAX_TERMS:
        raise NonConvergent("truncation index exceeds term budget")
    lo, hi = max(1, N // 2), N
    while lo < hi:
        mid = (lo + hi) // 2
        if log_bound(mid) < log_target:
            hi = mid
        else:
            lo = mid + 1
    return lo


def theta_eval(spec: ThetaSpec, tau, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """Partial sum of the defining series with certified tail bound."""
    with ctx.workprec():
        tau = mpc(tau)
    if not tau.imag > 0:
        raise ValueError("tau must lie in the upper half-plane")
    if spec.f.is_zero():
        return mpc(0)
    N = truncation_index(spec, tau.imag, ctx)
    prec = ctx.bits + 32
    gc = gmpy2.context(precision=prec, allow_complex=True)
    fvals = [to_g(v, prec) for v in spec.f.values]
    M = spec.period
    nu = spec.nu
    with gc:
        ipi = gmpy2.mpc(0, gmpy2.const_pi())
        a = gmpy2.exp(ipi * to_g(tau, prec) / M)   # e^{i pi tau / M}
        a2 = a * a
        qn = a          # a^{n^2} at n=1
        bn = a * a2     # a^{2n+1} at n=1
        acc = gmpy2.mpc(0)
        for n in range(1, N + 1):
            fv = fvals[n % M]
            if fv != 0:
                term = fv * qn
                if nu:
                    term *= gmpy2.mpz(n) ** nu
                acc += term
            qn = qn * bn
            bn = bn * a2
        return to_m(acc)


def lvalues(f: PeriodicFunction, kmax: int):
    """[L(0,f), L(-1,f), ..., L(-kmax,f)] from one Laurent computation."""
    g = build(0, f)
    _, taylor = laurent_at_zero(g, kmax)
    out = []
    with mpmath.workprec(VALUE_BITS):
        fact = mpf(1)
        for k in range(kmax + 1):
            if k:
                fact *= k
            out.append((-1) ** k * fact * taylor.coeffs[k])
    return out


def asymptotic_series(spec: ThetaSpec, P: int) -> TruncatedSeries:
    """Theta~ coefficients L(-2p-nu,f) (pi i/M)^p / p!, p = 0..P."""
    if P < 0:
        raise ValueError("order must be >= 0")
    M = spec.period
    ells = lvalues(spec.f, 2 * P + spec.nu)
    with mpmath.workprec(VALUE_BITS):
        z = mpc(0, 1) * mpmath.pi / M
        coeffs = []
        zp = mpc(1)
        fact = mpf(1)
        for p in range(P + 1):
            if p:
                zp *= z
                fact *= p
            coeffs.append(ells[2 * p + spec.nu] * zp / fact)
    return TruncatedSeries(Fraction(0), tuple(coeffs))


def twisted_function(spec: ThetaSpec, alpha) -> tuple:
    """(f_{alpha/M}, M_alpha) with f_{alpha/M}(n) = f(n) e^{i pi n^2 alpha / M}."""
    alpha = Fraction(alpha)
    return twist_beta(spec.f, alpha / spec.period)


def asymptotic_series_at(spec: ThetaSpec, alpha, P: int) -> TruncatedSeries:
    """Theta~_alpha: the series of the twisted data, with the original M."""
    alpha = Fraction(alpha)
    if alpha == 0:
        return asymptotic_series(spec, P)
    ft, _ = twisted_function(spec, alpha)
    M = spec.period
    ells = lvalues(ft, 2 * P + spec.nu)
    with mpmath.workprec(VALUE_BITS):
        z = mpc(0, 1) * mpmath.pi / M
        coeffs = []
        zp = mpc(1)
        fact = mpf(1)
        for p in range(P + 1):
            if p:
                zp *= z
                fact *= p
            coeffs.append(ells[2 * p + spec.nu] * zp / fact)
    return TruncatedSeries(Fraction(0), tuple(coeffs))


def qbar_membership(spec: ThetaSpec, alpha) -> bool:
    """alpha in Qbar_{f,M}, i.e. m(f_{alpha/M}) = 0."""
    ft, _ = twisted_function(spec, alpha)
    with mpmath.workprec(VALUE_BITS):
        mag = abs(mean(ft))
        if mag < mpf(QBAR_TOL):
            return True
        if mag < mpf(QBAR_INDETERMINATE):
            raise IndeterminateMembership(
                "twisted mean magnitude %s is in the indeterminate band" % mag)
    return False


def boundary_value(spec: ThetaSpec, alpha):
    """Theta^nt(alpha) = L(-nu, f_{alpha/M}) when defined, else None."""
    if not qbar_membership(spec, alpha):
        return None
    ft, _ = twisted_function(spec, alpha)
    ells = lvalues(ft, spec.nu)
    return ells[spec.nu]


def _g_forward_series(P: int) -> TruncatedSeries:
    """g(tau) = (e^{2 pi i tau} - 1)/(2 pi i) as a series of order P."""
    with mpmath.workprec(VALUE_BITS):
        twopii = mpc(0, 2) * mpmath.pi
        coeffs = []
        for k in range(1, P + 1):
            coeffs.append(twopii ** (k - 1) / mpmath.factorial(k))
    return TruncatedSeries(Fraction(1), tuple(coeffs))


def compose_q_variable(series: TruncatedSeries, P: int) -> TruncatedSeries:
    """Recompose a tau-series in the variable Q = (q-1)/(2 pi i), q = e^{2 pi i tau}."""
    if series.offset != 0:
        raise ValueError("series must have offset 0")
    if P > series.order:
        raise ValueError("requested order exceeds input order")
    outer = TruncatedSeries(Fraction(0), series.coeffs[:P + 1])
    inv = series_reversion(_g_forward_series(P), P)
    if P == 0:
        return outer
    return series_compose(outer, inv)
