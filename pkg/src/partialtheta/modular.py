"""SL(2,Z) action on partial theta series.

Exact nu = 0,1 transformation laws under the inversion S, coefficient
transport h for a general gamma = (a b; c d), congruence-subgroup scalar
factors lambda(gamma), quadratic Gauss sums, the quantum modular
obstructions G+/-, and boundary asymptotics at +-1/k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import mpmath
from mpmath import mpf, mpc

from .precision import PrecisionContext, DEFAULT_CTX
from .branching import power_tau_over_i
from .periodic import (PeriodicFunction, VALUE_BITS, dft, parity_split, mean,
                       twist_beta, support_n0, eigen_check,
                       is_dirichlet_character, zero_function)
from .theta import (ThetaSpec, theta_eval, qbar_membership, boundary_value,
                    lvalues)
from .series import TruncatedSeries
from .resummation import (DEFAULT_EPS, median_sum, directional_sum,
                          lateral_sums, stokes_closed_form)


@dataclass(frozen=True)
class ModularMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError("determinant must be 1")
        if self.c < 0 or (self.c == 0 and self.a < 0):
            for k in ("a", "b", "c", "d"):
                object.__setattr__(self, k, -getattr(self, k))
        if self.c == 0 and not (self.a == 1 and self.d == 1):
            raise ValueError("c = 0 requires the shift form (1, b; 0, 1)")

    @property
    def is_parabolic(self) -> bool:
        return self.c == 0

    def act(self, tau) -> mpc:
        tau = mpc(tau)
        if not tau.imag > 0:
            raise ValueError("tau must lie in the upper half-plane")
        den = self.c * tau + self.d
        if den == 0:
            raise ZeroDivisionError("parabolic fixed point at tau = -d/c")
        return (self.a * tau + self.b) / den


S_MATRIX = ModularMatrix(0, -1, 1, 0)
T_MATRIX = ModularMatrix(1, 1, 0, 1)


def jacobi_symbol(m: int, n: int) -> int:
    """Jacobi symbol (m/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("n must be odd and positive")
    return int(gmpy2.jacobi(m, n))


def _lambda_M_power(M: int, b: int, n: int) -> mpc:
    """Lambda_M^b(n) = e^{i pi b n^2 / M}."""
    e = Fraction(b * n * n, M) % 2
    with mpmath.workprec(VALUE_BITS):
        return mpmath.expjpi(mpf(e.numerator) / e.denominator)


def _check_assumptions(spec: ThetaSpec):
    """M even, nu in {0,1}, f even or odd; returns the parity of f."""
    if spec.period % 2 != 0:
        raise ValueError("M must be even")
    if spec.nu not in (0, 1):
        raise ValueError("nu must be 0 or 1")
    if spec.f.is_zero():
        return "zero"
    f_ev, f_od = parity_split(spec.f)
    tol = mpf("1e-40") * spec.f.sup_norm
    if f_od.is_zero(tol):
        return "even"
    if f_ev.is_zero(tol):
        return "odd"
    raise ValueError("f must be even or odd")


def h_function(gamma: ModularMatrix, spec: ThetaSpec) -> PeriodicFunction:
    """Transported coefficient function of the same period and parity.

    h(n) = (cM)^{-1/2} Lambda_M^{bd}(n) sum_{r mod M} f(r+dn) g(r)
    e^{2 pi i b n r / M}, g(r) = sum_{l mod cM, l = r mod M} Lambda_{cM}^a(l).
    """
    _check_assumptions(spec)
    if gamma.c <= 0:
        raise ValueError("c must be positive")
    f = spec.f
    M = f.period
    c = gamma.c
    with mpmath.workprec(VALUE_BITS):
        g = [mpc(0)] * M
        for l in range(c * M):
            g[l % M] += _lambda_M_power(c * M, gamma.a, l)
        root = 1 / mpmath.sqrt(mpf(c * M))
        vals = []
        for n in range(M):
            acc = mpc(0)
            for r in range(M):
                if g[r] == 0:
                    continue
                phase = Fraction(2 * gamma.b * n * r, M) % 2
                acc += (f(r + gamma.d * n) * g[r]
                        * mpmath.expjpi(mpf(phase.numerator) / phase.denominator))
            vals.append(root * _lambda_M_power(M, gamma.b * gamma.d, n) * acc)
        return PeriodicFunction(M, tuple(vals))


def _epsilon_d(d: int) -> mpc:
    r = d % 4
    if r == 1:
        return mpc(1)
    if r == 3:
        return mpc(0, 1)
    raise ValueError("d must be odd")


def congruence_lambda(gamma: ModularMatrix, spec: ThetaSpec):
    """Scalar lambda with h = lambda * f when gamma lies in a congruence
    subgroup adapted to f; None when no case applies."""
    parity = _check_assumptions(spec)
    if parity == "zero":
        return None
    M = spec.period
    f = spec.f
    if gamma.is_parabolic:
        if gamma.b % (2 * M) == 0:
            return mpc(1)
        n0 = support_n0(f)
        if n0 is not None:
            return _lambda_M_power(M, gamma.b, n0)
        return None
    a, b, c, d = gamma.a, gamma.b, gamma.c, gamma.d
    if d % 2 == 0 or c % (2 * M) != 0:
        return None
    with mpmath.workprec(VALUE_BITS):
        e4 = mpmath.expjpi(mpf(1) / 4)
        jac = jacobi_symbol(2 * M * c, abs(d))
        if c % (2 * M) == 0 and a % (2 * M) == 1 and d % (2 * M) == 1:
            if b % (2 * M) == 0:
                return e4 * jac
            n0 = support_n0(f)
            if n0 is not None:
                return _lambda_M_power(M, b, n0) * e4 * jac
        if c % (2 * M) == 0 and b % (2 * M) == 0 and is_dirichlet_character(f):
            return e4 / _epsilon_d(d) * jac * f(d)
    return None


def verify_exact_relation(spec: ThetaSpec, tau,
                          ctx: PrecisionContext = DEFAULT_CTX) -> mpf:
    """Residual of the nu = 0 or nu = 1 master decomposition identity."""
    if spec.nu not in (0, 1):
        raise ValueError("nu must be 0 or 1")
    with ctx.workprec():
        tau = mpc(tau)
        if not tau.imag > 0:
            raise ValueError("tau must lie in the upper half-plane")
        if spec.f.is_zero():
            return mpf(0)
        f_ev, f_od = parity_split(spec.f)
        fh_ev, fh_od = parity_split(dft(spec.f))
        minus_inv = mpc(-1) / tau
        lhs = theta_eval(spec, tau, ctx)
        tol = mpf("1e-60") * max(spec.f.sup_norm, 1)
        if spec.nu == 0:
            rhs = (fh_ev(0) / 2 * power_tau_over_i(tau, Fraction(-1, 2))
                   - f_ev(0) / 2)
            if not f_od.is_zero(tol):
                rhs += median_sum(ThetaSpec(0, f_od), tau, ctx=ctx)
            if not fh_ev.is_zero(tol):
                rhs += (power_tau_over_i(tau, Fraction(-1, 2))
                        * theta_eval(ThetaSpec(0, fh_ev), minus_inv, ctx))
        else:
            M = spec.period
            rhs = -mpmath.sqrt(mpf(M)) / (2 * mpmath.pi * mpc(0, 1)) \
                * fh_ev(0) / tau
            if not f_ev.is_zero(tol):
                rhs += median_sum(ThetaSpec(1, f_ev), tau, ctx=ctx)
            if not fh_od.is_zero(tol):
                rhs += (mpc(0, 1) * power_tau_over_i(tau, Fraction(-3, 2))
                        * theta_eval(ThetaSpec(1, fh_od), minus_inv, ctx))
        return abs(lhs - rhs)


def _twisted_for_obstruction(h: PeriodicFunction, gamma: ModularMatrix):
    """Lambda_{cM}^{-d} h, declared with period cM (cM is even here)."""
    cM = gamma.c * h.period
    with mpmath.workprec(VALUE_BITS):
        vals = tuple(_lambda_M_power(cM, -gamma.d, n) * h(n)
                     for n in range(cM))
    return PeriodicFunction(cM, vals)


def verify_gamma_relation(gamma: ModularMatrix, spec: ThetaSpec, tau,
                          ctx: PrecisionContext = DEFAULT_CTX) -> mpf:
    """Residual of the transformation law selected by (nu, parity of f)."""
    parity = _check_assumptions(spec)
    if parity == "zero":
        return mpf(0)
    with ctx.workprec():
        tau = mpc(tau)
        if not tau.imag > 0:
            raise ValueError("tau must lie in the upper half-plane")
        M = spec.period
        if gamma.is_parabolic:
            from .periodic import lambda_twist
            ft = lambda_twist(spec.f, gamma.b)
            lhs = theta_eval(spec, tau + gamma.b, ctx)
            rhs = theta_eval(ThetaSpec(spec.nu, ft), tau, ctx)
            return abs(lhs - rhs)
        h = h_function(gamma, spec)
        gtau = gamma.act(tau)
        cd = gamma.c * tau + gamma.d
        if spec.nu == 0 and parity == "even":
            lhs = spec.f(0) + 2 * theta_eval(ThetaSpec(0, spec.f), gtau, ctx)
            rhs = power_tau_over_i(cd, Fraction(1, 2)) \
                * (h(0) + 2 * theta_eval(ThetaSpec(0, h), tau, ctx))
            return abs(lhs - rhs)
        if spec.nu == 1 and parity == "odd":
            lhs = theta_eval(ThetaSpec(1, spec.f), gtau, ctx)
            rhs = mpc(0, 1) * power_tau_over_i(cd, Fraction(3, 2)) \
                * theta_eval(ThetaSpec(1, h), tau, ctx)
            return abs(lhs - rhs)
        # obstruction identities: both lateral signs are checked
        hw = _twisted_for_obstruction(h, gamma)
        hw_spec = ThetaSpec(spec.nu, hw)
        th_h = theta_eval(ThetaSpec(spec.nu, h), tau, ctx)
        th_g = theta_eval(spec, gtau, ctx)
        res = mpf(0)
        a_cd = float(mpmath.arg(cd))
        for sign, theta_dir in ((1, math.pi / 2 - DEFAULT_EPS),
                                (-1, math.pi / 2 + DEFAULT_EPS)):
            # the ray converges only for |theta - arg(c tau + d)| < pi/2;
            # otherwise reach the lateral value from the opposite ray and
            # the closed-form jump across the singular direction
            usable = (a_cd < math.pi - DEFAULT_EPS - 0.05) if sign > 0 \
                else (a_cd > DEFAULT_EPS + 0.05)
            if usable:
                lateral = directional_sum(hw_spec, cd, theta_dir, ctx)
            else:
                other = math.pi / 2 + sign * DEFAULT_EPS
                lateral = directional_sum(hw_spec, cd, other, ctx) \
                    + sign * stokes_closed_form(hw_spec, cd, ctx)
            if spec.nu == 1:   # f even
                lhs = th_h + sign * mpc(0, 1) \
                    * power_tau_over_i(cd, Fraction(-3, 2)) * th_g
                rhs = (mpmath.sqrt(mpf(gamma.c * M)) / (2 * mpmath.pi)
                       * spec.f(0) * mpc(0, 1) / cd) + lateral
            else:              # nu = 0, f odd
                lhs = th_h - sign \
                    * power_tau_over_i(cd, Fraction(-1, 2)) * th_g
                rhs = lateral
            res = max(res, abs(lhs - rhs))
        return res


# ---------------------------------------------------------------------------
# Quantum modular obstruction G+/-
# ---------------------------------------------------------------------------


def _obstruction_parity(spec: ThetaSpec) -> None:
    if spec.f.is_zero():
        return
    f_ev, f_od = parity_split(spec.f)
    tol = mpf("1e-40") * spec.f.sup_norm
    if spec.nu == 0 and f_ev.is_zero(tol):
        return
    if spec.nu == 1 and f_od.is_zero(tol):
        return
    raise ValueError("obstruction needs nu=0 with f odd or nu=1 with f even")


def _vector_data(spec: ThetaSpec):
    """(components, J rows): scalar eigenvector case gives one component."""
    lam = eigen_check(spec.f) if not spec.f.is_zero() else None
    if lam is not None:
        return (spec.f,), ((lam,),)
    sign = -1 if spec.nu % 2 == 0 else 1
    return (spec.f, dft(spec.f)), ((0, 1), (sign, 0))


def _choose_eps(sign: int, a: float) -> float:
    if sign > 0:
        if a <= math.pi / 12:
            eps = math.pi / 3
        else:
            eps = min(DEFAULT_EPS, (math.pi - a) / 2)
        if not -eps < a < math.pi - eps:
            raise ValueError("arg tau outside the supported sector of G+")
    else:
        if a >= math.pi - math.pi / 12:
            eps = math.pi / 3
        else:
            eps = min(DEFAULT_EPS, a / 2)
        if not eps < a < math.pi + eps:
            raise ValueError("arg tau outside the supported sector of G-")
    return eps


def quantum_obstruction(spec: ThetaSpec, sign: int, tau,
                        ctx: PrecisionContext = DEFAULT_CTX, *,
                        arg_tau=None, method: str = "auto", eps=None):
    """G+(tau) (sign=+1) or G-(tau) (sign=-1).

    Returns a scalar when f is an eigenvector of the transform, else a pair
    (component along f, component along the transform of f).

    method 'direct' combines theta evaluations (tau in H only); 'borel' uses
    the single lateral Laplace sum and accepts arg_tau continuation for
    arg tau in (-pi/4, 0] (G+) or [pi, 5pi/4) (G-).
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    _obstruction_parity(spec)
    with ctx.workprec():
        tau = mpc(tau)
        if arg_tau is None:
            arg_tau = float(mpmath.arg(tau))
        if method == "auto":
            method = "direct" if (tau.imag > 0
                                  and 0 < arg_tau < math.pi) else "borel"
        comps, J = _vector_data(spec)
        nu = spec.nu
        M = spec.period
        if method == "direct":
            if not tau.imag > 0:
                raise ValueError("direct combination requires tau in H")
            minus_inv = mpc(-1) / tau
            th = [theta_eval(ThetaSpec(nu, g), tau, ctx) for g in comps]
            th_inv = [theta_eval(ThetaSpec(nu, g), minus_inv, ctx)
                      for g in comps]
            pw = mpc(0, 1) ** nu * power_tau_over_i(
                tau, Fraction(-1 - 2 * nu, 2), arg_tau)
            out = []
            for i, g in enumerate(comps):
                val = th[i] + sign * pw * sum(
                    J[i][j] * th_inv[j] for j in range(len(comps)))
                val += M * mean(g) / (2 * mpmath.pi * mpc(0, 1) * tau)
                out.append(val)
        elif method == "borel":
            e = eps if eps is not None else _choose_eps(sign, arg_tau)
            theta_dir = math.pi / 2 - sign * e
            out = [directional_sum(ThetaSpec(nu, g), tau, theta_dir, ctx,
                                   arg_tau=arg_tau) for g in comps]
        else:
            raise ValueError("method must be 'auto', 'direct' or 'borel'")
    return out[0] if len(out) == 1 else tuple(out)


# ---------------------------------------------------------------------------
# Quadratic Gauss sums
# ---------------------------------------------------------------------------


def gauss_mean(f: PeriodicFunction, alpha) -> mpc:
    """m(f_{alpha/M}) as the finite sum over one twisted period."""
    alpha = Fraction(alpha)
    ft, _ = twist_beta(f, alpha / f.period)
    with mpmath.workprec(VALUE_BITS):
        return mean(ft)


def gauss_reciprocity_residual(f: PeriodicFunction, alpha) -> mpf:
    """|m(f_{alpha/M}) - (i alpha)^{1/2} m((dft f)_{-1/(alpha M)})|."""
    alpha = Fraction(alpha)
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    with mpmath.workprec(VALUE_BITS):
        lhs = gauss_mean(f, alpha)
        fh = dft(f)
        # the twist of dft f is by -1/(alpha M), i.e. the point -1/alpha
        rhs_mean = gauss_mean(fh, -1 / alpha)
        root = mpmath.sqrt(mpc(0, 1) * mpf(alpha.numerator)
                           / alpha.denominator)
        return abs(lhs - root * rhs_mean)


# ---------------------------------------------------------------------------
# Boundary asymptotics at +-1/k
# ---------------------------------------------------------------------------


def _require_boundary_point(spec: ThetaSpec, alpha) -> None:
    if not (qbar_membership(spec, alpha)
            and qbar_membership(ThetaSpec(spec.nu, dft(spec.f)), alpha)):
        raise ValueError("alpha = %s is not a boundary point of the data"
                         % (alpha,))


def boundary_tail_series(spec: ThetaSpec, sign: int, P: int) -> TruncatedSeries:
    """Gevrey tail: coefficients of 1/k^p in Theta~(sign/k; nu, f)."""
    M = spec.period
    ells = lvalues(spec.f, 2 * P + spec.nu)
    with mpmath.workprec(VALUE_BITS):
        z = sign * mpc(0, 1) * mpmath.pi / M
        coeffs = []
        zp = mpc(1)
        fact = mpf(1)
        for p in range(P + 1):
            if p:
                zp *= z
                fact *= p
            coeffs.append(ells[2 * p + spec.nu] * zp / fact)
    return TruncatedSeries(Fraction(0), tuple(coeffs))


def boundary_asymptotics(spec: ThetaSpec, k: int, sign: int, P: int,
                         ctx: PrecisionContext = DEFAULT_CTX):
    """(exact, predicted, tail) for Theta^nt(sign/k; nu, F).

    exact is the nontangential boundary value at sign/k; predicted is the
    right-hand side of the quantum modularity relation with G evaluated by
    its lateral Borel representation; tail is the Gevrey series in 1/k.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    _obstruction_parity(spec)
    alpha = Fraction(sign, k)
    _require_boundary_point(spec, alpha)
    _require_boundary_point(spec, -k * sign)
    comps, J = _vector_data(spec)
    nu = spec.nu
    M = spec.period
    with ctx.workprec():
        exact = [boundary_value(ThetaSpec(nu, g), alpha) for g in comps]
        far = [boundary_value(ThetaSpec(nu, g), -sign * k) for g in comps]
        tau = mpf(sign) / k
        arg = 0.0 if sign > 0 else math.pi
        gval = quantum_obstruction(spec, sign, mpc(tau), ctx,
                                   arg_tau=arg, method="borel")
        if not isinstance(gval, tuple):
            gval = (gval,)
        pred = []
        for i in range(len(comps)):
            jfar = sum(J[i][j] * far[j] for j in range(len(comps)))
            if nu == 0:
                val = -mpc(0, 1) * mpmath.expjpi(-mpf(sign) / 4) \
                    * mpmath.sqrt(mpf(k)) * jfar + gval[i]
            else:
                val = mpmath.expjpi(mpf(sign) / 4) * mpf(k) ** mpf("1.5") \
                    * jfar + gval[i]
                val -= sign * M * mean(comps[i]) \
                    / (2 * mpmath.pi * mpc(0, 1)) * k
            pred.append(val)
    tail = boundary_tail_series(spec, sign, P)
    if len(comps) == 1:
        return exact[0], pred[0], tail
    return tuple(exact), tuple(pred), tail
