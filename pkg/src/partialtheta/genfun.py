"""The generating function F(t) = sum_{n>=1} n^nu f(n) e^{-nt} and its uses.

F is the rational function A(q)/(1-q^M)^{nu+1} in q = e^{-t}.  Its Laurent
data at t = 0 provide the L-values L(-k, f); its even/odd parts in t give
the Borel-plane functions phi_plus/phi_minus whose poles at
xi_n = i pi n^2 / M drive the Stokes phenomenon.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import mpmath
from mpmath import mpf, mpc

from .precision import PrecisionContext, DEFAULT_CTX, to_g, to_m
from .periodic import PeriodicFunction, VALUE_BITS, dft, parity_split, mean
from .series import TruncatedSeries

_GUARD_BITS = 16


@dataclass(frozen=True)
class GenFun:
    nu: int
    f: PeriodicFunction
    numerator: tuple  # coefficient of q^j at index j; degree <= (nu+1)M

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError("nu must be >= 0")
        with mpmath.workprec(VALUE_BITS):
            num = tuple(v if isinstance(v, mpc) else mpc(v) for v in self.numerator)
        object.__setattr__(self, "numerator", num)

    @property
    def period(self) -> int:
        return self.f.period

    @property
    def denom_power(self) -> int:
        return self.nu + 1


def build(nu: int, f: PeriodicFunction) -> GenFun:
    """F = (q d/dq)^nu [A0(q)/(1-q^M)] with A0(q) = sum_{l=1..M} f(l) q^l."""
    M = f.period
    with mpmath.workprec(VALUE_BITS):
        num = [mpc(0)] * (M + 1)
        for ell in range(1, M + 1):
            num[ell] = f(ell)
        # q d/dq maps A/(1-q^M)^{k+1} to
        # [q A'(q)(1-q^M) + (k+1) M q^M A]/(1-q^M)^{k+2}
        for k in range(nu):
            d = len(num) - 1
            out = [mpc(0)] * (d + M + 1)
            for j, a in enumerate(num):
                if a == 0:
                    continue
                out[j] += j * a
                out[j + M] += (-(j) + (k + 1) * M) * a
            num = out
    return GenFun(nu, f, tuple(num))


def _lattice_distance(x: mpf, y: mpf, M: int) -> mpf:
    """Distance from t = x+iy to the pole lattice (2 pi i / M) Z."""
    step = 2 * mpmath.pi / M
    r = mpmath.fmod(y, step)
    if r < 0:
        r += step
    dy = min(r, step - r)
    return mpmath.hypot(x, dy)


class _RationalEvaluator:
    """gmpy2-side evaluation of F and of its regular part F_reg.

    A fixed ratio r_switch of the pole distance 2 pi / M separates the
    Taylor regime (small |t|, where the rational form cancels
    catastrophically against the pole term) from the rational regime, where
    extra working bits proportional to the pole proximity are added.
    """

    def __init__(self, g: GenFun, ctx: PrecisionContext):
        self.g = g
        self.ctx = ctx
        self.prec = ctx.bits + _GUARD_BITS
        M = g.period
        self.M = M
        gc = gmpy2.context(precision=self.prec + 64)
        with gc:
            self.step = 2 * gmpy2.const_pi() / M
            self.r_switch = self.step / 4
        self.num = [to_g(c, self.prec + 64) for c in g.numerator]
        self.num_rev = list(reversed(self.num))
        with mpmath.workprec(VALUE_BITS):
            self.pole_coeff = to_g(mpmath.factorial(g.nu) * mean(g.f),
                                   self.prec + 64)
        ntaylor = (ctx.bits + 48) // 2 + g.nu + 2
        _, taylor = laurent_at_zero(g, ntaylor)
        self.tay_even = [to_g(c, self.prec + 64)
                         for c in taylor.coeffs[0::2]]
        self.tay_odd = [to_g(c, self.prec + 64)
                        for c in taylor.coeffs[1::2]]

    def _dist(self, t) -> float:
        """Crude distance from t to the pole lattice, in units of the gap."""
        x = float(t.real)
        y = float(t.imag)
        step = float(self.step)
        r = math.fmod(y, step)
        if r < 0:
            r += step
        dy = min(r, step - r)
        return math.hypot(x, dy) / step

    def _rat(self, t, prec):
        """A(q)/(1-q^M)^{nu+1} at q = e^{-t}, stable for |q| above or below 1."""
        nu1 = self.g.nu + 1
        gc = gmpy2.context(precision=prec, allow_complex=True)
        with gc:
            if t.real >= 0:
                q = gmpy2.exp(-t)
                acc = gmpy2.mpc(0)
                for c in self.num_rev:
                    acc = acc * q + c
                den = (1 - q ** self.M) ** nu1
            else:
                # |q| > 1: divide through by q^{(nu+1)M}
                w = gmpy2.exp(t)
                deg = len(self.num) - 1
                top = nu1 * self.M
                acc = gmpy2.mpc(0)
                for c in self.num:
                    acc = acc * w + c
                acc *= w ** (top - deg)
                den = (w ** self.M - 1) ** nu1
            if den == 0:
                raise ZeroDivisionError("pole of the rational form")
            return acc / den

    def f_full(self, t, prec=None):
        """F(t) with pole-proximity-adaptive working precision."""
        d = self._dist(t)
        if prec is None:
            extra = 0
            if d < 1.0:
                extra = int((self.g.nu + 1) * max(0.0, -math.log2(max(d, 1e-300)))) + 8
            prec = self.prec + extra
        return self._rat(t, prec)

    def f_reg(self, t):
        """F(t) - nu! m(f) / t^{nu+1}, the regular part at 0."""
        if abs(t) < self.r_switch:
            return self._taylor_eval(t)
        gc = gmpy2.context(precision=self.prec + 64, allow_complex=True)
        with gc:
            return self.f_full(t) - self.pole_coeff / t ** (self.g.nu + 1)

    def _taylor_eval(self, t):
        gc = gmpy2.context(precision=self.prec + 64, allow_complex=True)
        with gc:
            t2 = t * t
            ev = gmpy2.mpc(0)
            for c in reversed(self.tay_even):
                ev = ev * t2 + c
            od = gmpy2.mpc(0)
            for c in reversed(self.tay_odd):
                od = od * t2 + c
            return ev + t * od

    def f_plus(self, t):
        """Even part of F_reg."""
        if abs(t) < self.r_switch:
            gc = gmpy2.context(precision=self.prec + 64, allow_complex=True)
            with gc:
                t2 = t * t
                ev = gmpy2.mpc(0)
                for c in reversed(self.tay_even):
                    ev = ev * t2 + c
                return ev
        gc = gmpy2.context(precision=self.prec + 64, allow_complex=True)
        with gc:
            return (self.f_reg(t) + self.f_reg(-t)) / 2

    def f_minus_over_t(self, t):
        """Odd part of F_reg divided by t (analytic at 0)."""
        gc = gmpy2.context(precision=self.prec + 64, allow_complex=True)
        if abs(t) < self.r_switch:
            with gc:
                t2 = t * t
                od = gmpy2.mpc(0)
                for c in reversed(self.tay_odd):
                    od = od * t2 + c
                return od
        with gc:
            return (self.f_reg(t) - self.f_reg(-t)) / (2 * t)


_eval_cache = {}
_eval_lock = threading.Lock()


def evaluator(g: GenFun, ctx: PrecisionContext = DEFAULT_CTX) -> _RationalEvaluator:
    key = (g, ctx.bits, str(ctx.target_abs_error))
    with _eval_lock:
        ev = _eval_cache.get(key)
    if ev is None:
        ev = _RationalEvaluator(g, ctx)
        with _eval_lock:
            _eval_cache[key] = ev
    return ev


def eval_F(g: GenFun, t, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """Meromorphic evaluation of F at t, t not in (2 pi i / M) Z."""
    with ctx.workprec():
        t = mpc(t)
        d = _lattice_distance(t.real, t.imag, g.period)
        if d < mpf(10) ** (-(ctx.bits // 2)):
            raise ZeroDivisionError("t within 10^-(bits/2) of a pole of F")
    ev = evaluator(g, ctx)
    return to_m(ev.f_full(to_g(t, ctx.bits + _GUARD_BITS + 64)))


# ---------------------------------------------------------------------------
# Laurent data at t = 0 and L-values
# ---------------------------------------------------------------------------

_laurent_cache = {}
_laurent_lock = threading.Lock()


def laurent_at_zero(g: GenFun, P: int):
    """(pole_coeff, taylor) with F(t) = pole_coeff/t^{nu+1} + taylor(t) + O(t^{P+1}).

    pole_coeff = nu! m(f); the intermediate powers t^{-nu}..t^{-1} vanish
    identically and are checked to do so numerically.
    """
    if P < 0:
        raise ValueError("order must be >= 0")
    key = (g, P)
    with _laurent_lock:
        hit = _laurent_cache.get(key)
    if hit is not None:
        return hit
    nu = g.nu
    M = g.period
    K = P + nu + 1
    deg = len(g.numerator) - 1
    # headroom for the alternating sums sum_j a_j (-j)^k / k!
    guard = 64
    for k in range(1, K + 1):
        guard = max(guard, int(k * math.log2(max(deg, 2))
                               - math.lgamma(k + 1) / math.log(2)) + 64)
    prec = VALUE_BITS + guard
    with mpmath.workprec(prec):
        # numerator Taylor coefficients n_k of sum_j a_j e^{-jt}
        nser = [mpc(0)] * (K + 1)
        for j, a in enumerate(g.numerator):
            if a == 0:
                continue
            term = mpc(a)
            nser[0] += term
            for k in range(1, K + 1):
                term = term * (-j) / k
                nser[k] += term
        # d(t) = ((1 - e^{-Mt})/t)^{nu+1}, constant term M^{nu+1}
        b = [mpf(0)] * (K + 1)
        term = mpf(M)
        b[0] = term
        for k in range(1, K + 1):
            term = term * (-M) / (k + 2 - 1)
            b[k] = term
        d = [mpf(1)] + [mpf(0)] * K
        for _ in range(nu + 1):
            nd = [mpc(0)] * (K + 1)
            for i, ci in enumerate(d):
                if ci == 0:
                    continue
                for jj in range(K + 1 - i):
                    nd[i + jj] += ci * b[jj]
            d = nd
        # long division s = nser / d
        s = [mpc(0)] * (K + 1)
        for k in range(K + 1):
            acc = nser[k]
            for j in range(k):
                acc -= s[j] * d[k - j]
            s[k] = acc / d[0]
        pole = s[0]
        tol = mpf(2) ** (-VALUE_BITS // 2) * (1 + abs(pole))
        for j in range(1, nu + 1):
            if abs(s[j]) > tol:
                raise ArithmeticError("unexpected intermediate pole term")
        with mpmath.workprec(VALUE_BITS):
            taylor = TruncatedSeries(Fraction(0),
                                     tuple(mpc(c) for c in s[nu + 1:]))
            pole = mpc(pole)
    out = (pole, taylor)
    with _laurent_lock:
        _laurent_cache[key] = out
    return out


def lvalue(f: PeriodicFunction, k: int) -> mpc:
    """L(-k, f) of the continued L-function, via the nu=0 Laurent data."""
    if k < 0:
        raise ValueError("k must be >= 0")
    g = build(0, f)
    _, taylor = laurent_at_zero(g, k)
    with mpmath.workprec(VALUE_BITS):
        return (-1) ** k * mpmath.factorial(k) * taylor.coeffs[k]


# ---------------------------------------------------------------------------
# Borel-plane functions
# ---------------------------------------------------------------------------


def borel_constant(M: int, prec: int):
    """C = (4 pi / M)^{1/2} e^{i pi/4}, as a gmpy2 mpc."""
    gc = gmpy2.context(precision=prec, allow_complex=True)
    with gc:
        root = gmpy2.sqrt(4 * gmpy2.const_pi() / M)
        phase = gmpy2.exp(gmpy2.mpc(0, gmpy2.const_pi() / 4))
        return root * phase


def xi_singularity(n: int, M: int, prec: int = 256):
    """xi_n = i pi n^2 / M as an mpmath mpc."""
    with mpmath.workprec(prec):
        return mpc(0, mpmath.pi * n * n / M)


def _check_xi(g: GenFun, xi, bits: int):
    with mpmath.workprec(bits):
        xi = mpc(xi)
        if xi == 0:
            return xi
        n = int(mpmath.nint(mpmath.sqrt(abs(xi) * g.period / mpmath.pi)))
        if n >= 1:
            xin = xi_singularity(n, g.period, bits)
            if abs(xi - xin) < mpf("1e-8") * abs(xin):
                raise ZeroDivisionError("xi within relative 1e-8 of xi_%d" % n)
        return xi


def _t_of_xi(g: GenFun, xi, prec: int):
    """t = C xi^{1/2} (either square root; the Borel functions are even)."""
    gc = gmpy2.context(precision=prec, allow_complex=True)
    with gc:
        return borel_constant(g.period, prec) * gmpy2.sqrt(to_g(mpc(xi), prec))


def borel_plus(g: GenFun, xi, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """phi_plus(xi) = pi^{-1/2} F_plus(C xi^{1/2}); meromorphic in xi."""
    xi = _check_xi(g, xi, ctx.bits)
    ev = evaluator(g, ctx)
    prec = ctx.bits + _GUARD_BITS + 64
    t = _t_of_xi(g, xi, prec)
    gc = gmpy2.context(precision=prec, allow_complex=True)
    with gc:
        val = ev.f_plus(t) / gmpy2.sqrt(gmpy2.const_pi())
    return to_m(val)


def borel_minus(g: GenFun, xi, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """phi_minus(xi) = pi^{-1/2} (C / t) F_minus(t), t = C xi^{1/2}."""
    xi = _check_xi(g, xi, ctx.bits)
    ev = evaluator(g, ctx)
    prec = ctx.bits + _GUARD_BITS + 64
    t = _t_of_xi(g, xi, prec)
    gc = gmpy2.context(precision=prec, allow_complex=True)
    with gc:
        C = borel_constant(g.period, prec)
        val = C * ev.f_minus_over_t(t) / gmpy2.sqrt(gmpy2.const_pi())
    return to_m(val)


# ---------------------------------------------------------------------------
# Singularity data at xi_n
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SingularityDatum:
    n: int
    order: int
    principal_coeffs: tuple  # (xi-xi_n)^{-order} ... (xi-xi_n)^{-1}

    def __post_init__(self):
        object.__setattr__(self, "principal_coeffs",
                           tuple(mpc(c) for c in self.principal_coeffs))


def _closed_form(g: GenFun, n: int, which: str) -> SingularityDatum:
    nu = g.nu
    if nu not in (0, 1):
        raise ValueError("closed forms available for nu in {0, 1} only")
    with mpmath.workprec(VALUE_BITS):
        fh = dft(g.f)
        fh_ev, fh_od = parity_split(fh)
        e4 = mpmath.expjpi(mpf(1) / 4)
        if which == "minus_half":
            if nu == 0:
                c = e4 * fh_ev(n) / (2 * mpmath.pi * mpc(0, 1))
                return SingularityDatum(n, 1, (c,))
            c2 = (mpc(0, 1) * mpmath.expjpi(mpf(3) / 4) * n * fh_od(n)
                  / (-2 * mpmath.pi * mpc(0, 1)))
            return SingularityDatum(n, 2, (c2, mpc(0)))
        if which == "plus_sqrt":
            if nu == 0:
                c = e4 * fh_od(n) / (mpmath.pi * mpc(0, 1))
                return SingularityDatum(n, 1, (c,))
            c2 = mpmath.expjpi(mpf(-1) / 4) * n * fh_ev(n) / mpmath.pi
            return SingularityDatum(n, 2, (c2, mpc(0)))
    raise ValueError("which must be 'minus_half' or 'plus_sqrt'")


def _contour_coeffs(g: GenFun, n: int, which: str, order: int,
                    ctx: PrecisionContext):
    """Principal-part coefficients of the meromorphic phi function at xi_n
    by trapezoidal contour integration on a small circle."""
    ev = evaluator(g, ctx)
    prec = ctx.bits + _GUARD_BITS + 64
    gc = gmpy2.context(precision=prec, allow_complex=True)
    with gc:
        pi_g = gmpy2.const_pi()
        xin = gmpy2.mpc(0, pi_g * n * n / g.period)
        gap = pi_g * (2 * n - 1) / g.period
        r = gap / 4
        N = 4 * ctx.bits
        C = borel_constant(g.period, prec)
        sums = [gmpy2.mpc(0)] * order
        for k in range(N):
            ang = 2 * pi_g * k / N
            w = r * gmpy2.exp(gmpy2.mpc(0, ang))
            xi = xin + w
            t = C * gmpy2.sqrt(xi)
            if which == "minus_half":
                val = C * ev.f_minus_over_t(t) / (2 * gmpy2.sqrt(pi_g))
            else:
                val = ev.f_plus(t) / gmpy2.sqrt(pi_g)
            for j in range(order):
                # coefficient of (xi-xi_n)^{-(j+1)}: (1/2 pi i) int phi w^j dxi
                sums[j] += val * w ** (j + 1)
        coeffs = [to_m(s / N) for s in sums]
    return coeffs, to_m(xin)


def singularity_data(g: GenFun, n: int, which: str = "minus_half",
                     mode: str = "closed_form",
                     ctx: PrecisionContext = DEFAULT_CTX) -> SingularityDatum:
    """Principal part at xi_n of phi_minus/2 or of xi^{-1/2} phi_plus.

    closed_form uses the DFT formulas (nu in {0,1}); numeric extracts the
    coefficients of the meromorphic factor by contour integration and, for
    plus_sqrt, recombines them with the local expansion of xi^{-1/2}
    (branch value e^{-i pi/4}|xi_n|^{-1/2} on the upper edge of the cut).
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if mode == "closed_form":
        return _closed_form(g, n, which)
    if mode != "numeric":
        raise ValueError("mode must be 'closed_form' or 'numeric'")
    order = 1 if g.nu == 0 else (2 if g.nu == 1 else g.nu // 2 + 1)
    coeffs, xin = _contour_coeffs(g, n, which, order, ctx)
    if which == "minus_half":
        out = list(reversed(coeffs))
        return SingularityDatum(n, order, tuple(out))
    with ctx.workprec():
        root = mpmath.expjpi(mpf(-1) / 4) / mpmath.sqrt(abs(xin))
        if order == 1:
            return SingularityDatum(n, 1, (coeffs[0] * root,))
        # xi^{-1/2} = root (1 - w/(2 xi_n) + ...), w = xi - xi_n
        a2, a1 = coeffs[1], coeffs[0]
        top = a2 * root
        sub = a1 * root - a2 * root / (2 * xin)
        return SingularityDatum(n, 2, (top, sub))


# ---------------------------------------------------------------------------
# Alien derivatives
# ---------------------------------------------------------------------------


def alien_closed_form(nu: int):
    """Exact structure of Delta_{xi_n} applied to the asymptotic series.

    Returns (prefactor_kind, terms): terms are (p, a, j, k) meaning
    a * (M/pi)^j * n^k * (tau/i)^p, all rational, to be multiplied by
    2*fhat_od(n) (nu even) or 2i*n*fhat_ev(n) (nu odd).  Derived by the
    commutator rule Delta_omega (d/dtau) = ((d/dtau) + omega tau^{-2})
    Delta_omega applied to the nu=0 / nu=1 base cases.
    """
    if not 0 <= nu <= 4:
        raise ValueError("closed forms available for 0 <= nu <= 4")
    parity = nu % 2
    if parity == 0:
        terms = [(Fraction(-1, 2), Fraction(1), 0, 0)]
    else:
        terms = [(Fraction(-3, 2), Fraction(1), 0, 0)]
    for _ in range((nu - parity) // 2):
        nxt = {}
        for (p, a, j, k) in terms:
            key1 = (p - 1, j + 1, k)
            nxt[key1] = nxt.get(key1, Fraction(0)) - a * p
            key2 = (p - 2, j, k + 2)
            nxt[key2] = nxt.get(key2, Fraction(0)) - a
        terms = [(p, a, j, k) for (p, j, k), a in nxt.items() if a != 0]
    terms.sort(key=lambda t: t[0])
    return ("odd_hat" if parity == 0 else "even_hat"), terms


def alien_derivative(g: GenFun, n: int):
    """Delta_{xi_n} of the asymptotic series, as [(tau-power, coefficient)].

    Coefficients are for plain powers tau^p (the (tau/i)^p structure of the
    closed form is converted via (tau/i)^p = e^{-i pi p / 2} tau^p).
    """
    if n <= 0:
        raise ValueError("n must be positive")
    kind, terms = alien_closed_form(g.nu)
    M = g.f.period
    with mpmath.workprec(VALUE_BITS):
        fh_ev, fh_od = parity_split(dft(g.f))
        if kind == "odd_hat":
            pref = 2 * fh_od(n)
        else:
            pref = 2 * mpc(0, 1) * n * fh_ev(n)
        if pref == 0:
            return []
        out = []
        mp_ratio = mpf(M) / mpmath.pi
        for (p, a, j, k) in terms:
            pf = mpf(p.numerator) / p.denominator
            coeff = (pref * mpf(a.numerator) / a.denominator
                     * mp_ratio ** j * mpf(n) ** k
                     * mpmath.expjpi(-pf / 2))
            out.append((p, coeff))
    return out
