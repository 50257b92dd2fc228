"""Directional Laplace sums of the Borel data and the decomposition of Theta.

The asymptotic series is resummed as
S^theta Theta~(tau) = tau^{-1/2} L^theta[xi^{-1/2} phi_plus](tau);
the exponentially small part is
Theta_minus = tau^{-1/2} (L^{pi/2-eps} - L^{pi/2+eps})[phi_minus/2].
The xi^{-1/2} factor follows the ray angle continuously through pi/2, so
L^theta applied to xi^{p-1/2}/Gamma(p+1/2) gives the principal tau^{p+1/2}
on both lateral rays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
import mpmath
from mpmath import mpf, mpc

from .precision import PrecisionContext, DEFAULT_CTX, NonConvergent, to_g, to_m
from .branching import power_tau_over_i
from .periodic import parity_split, dft, mean
from .genfun import GenFun, build, evaluator, borel_constant
from .theta import ThetaSpec, theta_eval
from .quadrature import quadrature_ray
from fractions import Fraction

DEFAULT_EPS = math.pi / 12
EPS_MIN = math.pi / 24


@dataclass(frozen=True)
class RaySum:
    direction: float
    tau: mpc
    value: mpc
    err: mpf


def _check_ray(theta: float, tau: mpc):
    if abs(theta - math.pi / 2) < EPS_MIN - 1e-12:
        raise ValueError("ray within eps_min of the singular direction pi/2")
    arg = float(mpmath.arg(tau))
    if not (theta - math.pi / 2 < arg < theta + math.pi / 2):
        raise ValueError("arg tau outside the convergence half-plane of the ray")


def _ray_quadrature(g: GenFun, theta: float, tau: mpc,
                    ctx: PrecisionContext):
    """One ray, both integrands: returns (A, B, err) with
    A = int e^{-xi/tau} xi^{-1/2} phi_plus dxi,
    B = int e^{-xi/tau} phi_minus/2 dxi.

    xi^{-1/2} is taken with arg xi = theta, continuously in the ray angle,
    so that L^theta[xi^{-1/2}/Gamma(1/2)] = tau^{1/2} (principal) on both
    lateral rays."""
    ev = evaluator(g, ctx)
    prec = ctx.bits + 16
    gc = gmpy2.context(precision=prec, allow_complex=True)
    with gc:
        C = borel_constant(g.period, prec)
        root_phase = gmpy2.exp(gmpy2.mpc(0, to_g(mpf(theta) / 2, prec)))
        sqrt_pi = gmpy2.sqrt(gmpy2.const_pi())
        with ctx.workprec():
            m_inv_tau = to_g(mpc(-1) / tau, prec)
        two = 2 * sqrt_pi

    def integrand(xi):
        w = gmpy2.exp(xi * m_inv_tau)
        if w == 0:
            return (gmpy2.mpc(0), gmpy2.mpc(0))
        r = gmpy2.sqrt(abs(xi))
        t = C * root_phase * r
        a = w * ev.f_plus(t) / (root_phase * r * sqrt_pi)
        b = w * C * ev.f_minus_over_t(t) / two
        return (a, b)

    with ctx.workprec():
        decay = float(mpmath.cos(theta - mpmath.arg(tau)) / abs(tau))
    res = quadrature_ray(integrand, theta, ctx,
                         endpoint_exponent=Fraction(-1, 2), decay_rate=decay)
    if not res.converged:
        raise NonConvergent("ray quadrature did not converge (theta=%s)" % theta)
    return res.value[0], res.value[1], res.err


def laplace_directional(kind: str, g: GenFun, theta: float, tau,
                        ctx: PrecisionContext = DEFAULT_CTX) -> RaySum:
    """L^theta of the declared Borel integrand against e^{-xi/tau}."""
    if kind not in ("borel_plus_with_sqrt", "borel_minus"):
        raise ValueError("unknown integrand kind: %s" % kind)
    with ctx.workprec():
        tau = mpc(tau)
    _check_ray(theta, tau)
    a, b, err = _ray_quadrature(g, theta, tau, ctx)
    value = a if kind == "borel_plus_with_sqrt" else 2 * b
    # heuristic pole-proximity penalty: the ray passes within
    # sin|theta-pi/2| * pi/M of xi_1
    dist = math.sin(abs(theta - math.pi / 2)) * math.pi / g.period
    err = err * (1 + math.pi / g.period / max(dist, 1e-30))
    return RaySum(direction=theta, tau=tau, value=value, err=err)


def _principal_power(tau, e: Fraction, arg_tau=None) -> mpc:
    """tau^e continued from arg tau = principal (or explicit arg_tau)."""
    tau = mpc(tau)
    principal = mpmath.arg(tau)
    if arg_tau is None:
        arg_tau = principal
    else:
        # the hint only selects the sheet; the argument is recomputed at
        # working precision
        turns = int(mpmath.nint((mpf(arg_tau) - principal) / (2 * mpmath.pi)))
        arg_tau = principal + 2 * turns * mpmath.pi
    ef = mpf(e.numerator) / e.denominator
    return mpmath.exp(ef * mpc(mpmath.log(abs(tau)), mpf(arg_tau)))


def directional_sum(spec: ThetaSpec, tau, theta: float,
                    ctx: PrecisionContext = DEFAULT_CTX, arg_tau=None) -> mpc:
    """S^theta Theta~(tau) = tau^{-1/2} L^theta[xi^{-1/2} phi_plus].

    arg_tau selects the branch of tau^{-1/2} when tau is reached by
    analytic continuation; it defaults to the principal argument.
    """
    with ctx.workprec():
        tau = mpc(tau)
        if arg_tau is None:
            _check_ray(theta, tau)
            arg_tau = mpmath.arg(tau)
        elif math.cos(theta - float(arg_tau)) <= 0:
            raise ValueError("arg tau outside the convergence half-plane "
                             "of the ray")
        g = build(spec.nu, spec.f)
        a, _, _ = _ray_quadrature(g, theta, tau, ctx)
        return _principal_power(tau, Fraction(-1, 2), arg_tau) * a


def lateral_sums(spec: ThetaSpec, tau, eps: float = DEFAULT_EPS,
                 ctx: PrecisionContext = DEFAULT_CTX, arg_tau=None):
    """(S^{pi/2-eps} Theta~, S^{pi/2+eps} Theta~) at tau."""
    with ctx.workprec():
        tau = mpc(tau)
        g = build(spec.nu, spec.f)
        tp = _principal_power(tau, Fraction(-1, 2), arg_tau)
        out = []
        for theta in (math.pi / 2 - eps, math.pi / 2 + eps):
            if arg_tau is None:
                _check_ray(theta, tau)
            a, _, _ = _ray_quadrature(g, theta, tau, ctx)
            out.append(tp * a)
    return out[0], out[1]


def median_sum(spec: ThetaSpec, tau, eps: float = DEFAULT_EPS,
               ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    s_minus, s_plus = lateral_sums(spec, tau, eps, ctx)
    with ctx.workprec():
        return (s_minus + s_plus) / 2


def theta_minus(spec: ThetaSpec, tau, ctx: PrecisionContext = DEFAULT_CTX,
                mode: str = "quadrature", eps: float = DEFAULT_EPS) -> mpc:
    """The exponentially small component Theta_minus of the decomposition."""
    with ctx.workprec():
        tau = mpc(tau)
        if not tau.imag > 0:
            raise ValueError("tau must lie in the upper half-plane")
        if mode == "closed_form":
            if spec.nu not in (0, 1):
                raise ValueError("closed form available for nu in {0,1} only")
            fh_ev, fh_od = parity_split(dft(spec.f))
            minus_inv = mpc(-1) / tau
            if spec.nu == 0:
                if fh_ev.is_zero(mpf("1e-100") * max(spec.f.sup_norm, 1)):
                    return mpc(0)
                inner = theta_eval(ThetaSpec(0, fh_ev), minus_inv, ctx)
                return power_tau_over_i(tau, Fraction(-1, 2)) * inner
            if fh_od.is_zero(mpf("1e-100") * max(spec.f.sup_norm, 1)):
                return mpc(0)
            inner = theta_eval(ThetaSpec(1, fh_od), minus_inv, ctx)
            return mpc(0, 1) * power_tau_over_i(tau, Fraction(-3, 2)) * inner
        if mode != "quadrature":
            raise ValueError("mode must be 'quadrature' or 'closed_form'")
        g = build(spec.nu, spec.f)
        tp = _principal_power(tau, Fraction(-1, 2))
        _, b_lo, _ = _ray_quadrature(g, math.pi / 2 - eps, tau, ctx)
        _, b_hi, _ = _ray_quadrature(g, math.pi / 2 + eps, tau, ctx)
        return tp * (b_lo - b_hi)


def decomposition(spec: ThetaSpec, tau, ctx: PrecisionContext = DEFAULT_CTX,
                  eps: float = DEFAULT_EPS):
    """(pole_term, theta_plus, theta_minus) summing to theta_eval(spec, tau)."""
    with ctx.workprec():
        tau = mpc(tau)
        if not tau.imag > 0:
            raise ValueError("tau must lie in the upper half-plane")
        nu, M = spec.nu, spec.period
        mf = mean(spec.f)
        pole = (mpmath.gamma(mpf(nu + 1) / 2) / 2 * mf
                * power_tau_over_i(tau * mpmath.pi / M, Fraction(-(nu + 1), 2))) \
            if mf != 0 else mpc(0)
        if spec.f.is_zero():
            return mpc(0), mpc(0), mpc(0)
        g = build(nu, spec.f)
        tp = _principal_power(tau, Fraction(-1, 2))
        a_lo, b_lo, _ = _ray_quadrature(g, math.pi / 2 - eps, tau, ctx)
        a_hi, b_hi, _ = _ray_quadrature(g, math.pi / 2 + eps, tau, ctx)
        th_plus = tp * (a_lo + a_hi) / 2
        th_minus = tp * (b_lo - b_hi)
        return pole, th_plus, th_minus


def stokes_difference(spec: ThetaSpec, tau, eps: float = DEFAULT_EPS,
                      ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """D(tau) = (S^{pi/2-eps} - S^{pi/2+eps}) Theta~."""
    _check_parity_for_stokes(spec)
    s_minus, s_plus = lateral_sums(spec, tau, eps, ctx)
    with ctx.workprec():
        return s_minus - s_plus


def stokes_closed_form(spec: ThetaSpec, tau,
                       ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """D(tau) = 2 (tau/i)^{-1/2} Theta(-1/tau; 0, fhat)   (nu=0, f odd)
             = 2i (tau/i)^{-3/2} Theta(-1/tau; 1, fhat)  (nu=1, f even)."""
    _check_parity_for_stokes(spec)
    with ctx.workprec():
        tau = mpc(tau)
        fh = dft(spec.f)
        minus_inv = mpc(-1) / tau
        if fh.is_zero(mpf("1e-100") * max(spec.f.sup_norm, 1)):
            return mpc(0)
        inner = theta_eval(ThetaSpec(spec.nu, fh), minus_inv, ctx)
        if spec.nu == 0:
            return 2 * power_tau_over_i(tau, Fraction(-1, 2)) * inner
        return 2 * mpc(0, 1) * power_tau_over_i(tau, Fraction(-3, 2)) * inner


def _check_parity_for_stokes(spec: ThetaSpec):
    if spec.f.is_zero():
        return
    f_ev, f_od = parity_split(spec.f)
    tol = mpf("1e-40") * spec.f.sup_norm
    if spec.nu == 0 and f_ev.is_zero(tol):
        return
    if spec.nu == 1 and f_od.is_zero(tol):
        return
    raise ValueError("Stokes closed form needs nu=0 with f odd "
                     "or nu=1 with f even")


def theta_via_parabola(spec: ThetaSpec, tau, c, ctx: PrecisionContext = DEFAULT_CTX) -> mpc:
    """Theta as a contour integral over the parabola Re t = c in the t-plane.

    Parametrizing t = c + i s reduces the parabola integral to
    (i tau^{-1/2} pi^{-1/2} / C) int_R e^{-(c+is)^2/(C^2 tau)} F(c+is) ds.
    """
    with ctx.workprec():
        tau = mpc(tau)
        if not tau.imag > 0:
            raise ValueError("tau must lie in the upper half-plane")
        M = spec.period
        cval = mpf(c)
        if not 0 < cval < 2 * mpmath.pi / M:
            raise ValueError("need 0 < c < 2 pi / M")
        if spec.f.is_zero():
            return mpc(0)
        g = build(spec.nu, spec.f)
        ev = evaluator(g, ctx)
        prec = ctx.bits + 16
        C = borel_constant(M, prec)
        gc = gmpy2.context(precision=prec, allow_complex=True)
        with gc:
            c_g = to_g(cval, prec)
            kappa = -1 / (C * C * to_g(tau, prec))   # -(1/(C^2 tau))
            pref = (mpc(0, 1) * _principal_power(tau, Fraction(-1, 2))
                    / mpmath.sqrt(mpmath.pi))
            pref_g = to_g(pref, prec) / C

        def integrand(s):
            si = s.real   # ray angle 0: s arrives as a complex with arg 0
            out = []
            for tt in (gmpy2.mpc(c_g, si), gmpy2.mpc(c_g, -si)):
                w = gmpy2.exp(kappa * tt * tt)
                out.append(w * ev.f_full(tt) if w != 0 else gmpy2.mpc(0))
            return tuple(out)

        decay = float(tau.imag / abs(tau) ** 2 * M / (4 * mpmath.pi))
        res = quadrature_ray(integrand, 0.0, ctx,
                             decay_rate=math.sqrt(decay))
        if not res.converged:
            raise NonConvergent("parabola quadrature did not converge")
        with gc:
            total = pref_g * (to_g(res.value[0], prec) + to_g(res.value[1], prec))
        return to_m(total)
