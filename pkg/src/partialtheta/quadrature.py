"""Double-exponential quadrature along rays from the origin.

The engine integrates f over the ray xi = e^{i*theta} * u, u in (0, inf),
for integrands that decay exponentially at infinity and have at worst an
algebraic singularity at the endpoint 0, declared by the caller.  A declared
u^{-1/2} endpoint factor triggers the substitution u = v^2 so that the
transformed integrand is analytic at 0.

Integrands receive and return gmpy2 numbers (the hot loops of this package
run on gmpy2 for speed); results are returned as mpmath values.  An
integrand may return a tuple, in which case all components are accumulated
in one pass over the nodes and convergence is judged on the worst component.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import mpmath
from mpmath import mpf

from .precision import PrecisionContext, DEFAULT_CTX, to_g, to_m

_WMAX = 6.8          # |sinh| ~ 450 here; u spans ~ e^{+-700}
_GUARD_BITS = 16

_node_cache = {}
_node_lock = threading.Lock()


def _nodes(prec: int, level: int, kmax: int):
    """Positive-k node data (E_k, C_k) for step h = 2^-level.

    E_k = exp((pi/2) sinh(k h)), C_k = (pi/2) cosh(k h); negative k follows
    from E_{-k} = 1/E_k, C_{-k} = C_k.
    """
    key = (prec, level)
    with _node_lock:
        cached = _node_cache.get(key)
        if cached is not None and len(cached) > kmax:
            return cached
    g = gmpy2.context(precision=prec)
    with g:
        h = gmpy2.exp2(-level)
        half_pi = gmpy2.const_pi() / 2
        out = [(gmpy2.mpfr(1), half_pi)]
        for k in range(1, kmax + 1):
            w = k * h
            sh = gmpy2.sinh(w)
            ch = gmpy2.cosh(w)
            out.append((gmpy2.exp(half_pi * sh), half_pi * ch))
    with _node_lock:
        _node_cache[key] = out
    return out


@dataclass(frozen=True)
class QuadratureResult:
    value: object            # mpc or tuple of mpc
    err: mpf
    converged: bool
    levels: int
    nodes: int


def quadrature_ray(integrand, theta, ctx: PrecisionContext = DEFAULT_CTX, *,
                   endpoint_exponent=Fraction(0), decay_rate=1.0,
                   max_levels: int = 12) -> QuadratureResult:
    """Integrate integrand(xi) d(xi) over the ray arg(xi) = theta.

    endpoint_exponent: declared algebraic behaviour u^sigma at 0 (sigma > -1;
    sigma = -1/2 activates the u = v^2 substitution).
    decay_rate: declared c > 0 with |integrand| = O(e^{-c u}) along the ray.
    """
    sigma = Fraction(endpoint_exponent)
    if sigma <= -1:
        raise ValueError("endpoint exponent must be > -1")
    substitute = sigma == Fraction(-1, 2)
    prec = ctx.bits + _GUARD_BITS
    g = gmpy2.context(precision=prec)
    with g:
        c = to_g(mpf(decay_rate), prec)
        if not c > 0:
            raise ValueError("decay rate must be positive")
        phase = gmpy2.exp(gmpy2.mpc(0, to_g(mpf(theta), prec)))
        if substitute:
            L = 1 / gmpy2.sqrt(c)
        else:
            L = 1 / c
        target = to_g(ctx.target_abs_error, prec)
        cutoff = target / 256

        def terms_at(k, E, C):
            """Weighted integrand value(s) at node k (E, C from _nodes)."""
            r = L * E
            if substitute:
                u = r * r
                jac = 2 * r * (r * C)      # dv weight times du/dv
            else:
                u = r
                jac = r * C
            vals = integrand(phase * u)
            if not isinstance(vals, tuple):
                vals = (vals,)
            return tuple(v * jac for v in vals)

        ncomp = None
        sums = None
        prev = None
        err = None
        converged = False
        total_nodes = 0
        level = 0
        for level in range(max_levels + 1):
            h = gmpy2.exp2(-level)
            kmax = int(_WMAX * (1 << level))
            nd = _nodes(prec, level, kmax)
            stride = 1 if level == 0 else 2
            start = 0 if level == 0 else 1
            part = None
            maxmag = gmpy2.mpfr(0)
            for direction in (1, -1):
                misses = 0
                k = start if direction == 1 else -start
                if level == 0 and direction == -1:
                    k = -1
                while abs(k) <= kmax:
                    E, C = nd[abs(k)]
                    if k < 0:
                        E = 1 / E
                    t = terms_at(k, E, C)
                    if ncomp is None:
                        ncomp = len(t)
                        part = [gmpy2.mpc(0)] * ncomp
                    if part is None:
                        part = [gmpy2.mpc(0)] * ncomp
                    mag = gmpy2.mpfr(0)
                    for i, v in enumerate(t):
                        part[i] += v
                        a = abs(v)
                        if a > mag:
                            mag = a
                    if mag > maxmag:
                        maxmag = mag
                    total_nodes += 1
                    if mag * h < cutoff:
                        misses += 1
                        if misses >= 3:
                            break
                    else:
                        misses = 0
                    k += direction * stride
                    if level == 0 and direction == 1 and k == 0:
                        k = 1  # k=0 handled once in the positive sweep
            if part is None:
                part = [gmpy2.mpc(0)] * (ncomp or 1)
                ncomp = ncomp or 1
            if level == 0:
                sums = [h * p for p in part]
            else:
                sums = [s / 2 + h * p for s, p in zip(sums, part)]
            if prev is not None:
                diff = max(abs(s - p) for s, p in zip(sums, prev))
                err = diff + cutoff
                if diff <= target / 2:
                    converged = True
                    break
            prev = list(sums)
        value = tuple(to_m(phase * s) for s in sums)
        err_m = to_m(err) if err is not None else mpf("inf")
    if ncomp == 1:
        value = value[0]
    return QuadratureResult(value=value, err=err_m, converged=converged,
                            levels=level, nodes=total_nodes)
