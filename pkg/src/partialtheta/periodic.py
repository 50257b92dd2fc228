"""M-periodic coefficient functions f: Z -> C.

Values are stored for the residues 0..M-1 at high fixed precision
(VALUE_BITS); all derived tables (DFT, parity parts, twists) are computed
at the same precision so that downstream evaluation never runs out of
accurate input digits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf, mpc

VALUE_BITS = 512


def _expjpi(x: Fraction, bits: int = VALUE_BITS) -> mpc:
    """e^{i pi x} for rational x, reduced mod 2 exactly before evaluation."""
    x = Fraction(x) % 2
    with mpmath.workprec(bits):
        return mpmath.expjpi(mpf(x.numerator) / x.denominator)


@dataclass(frozen=True)
class PeriodicFunction:
    period: int
    values: tuple

    def __post_init__(self):
        if self.period < 1:
            raise ValueError("period must be >= 1")
        with mpmath.workprec(VALUE_BITS):
            vals = tuple(v if isinstance(v, mpc) else mpc(v) for v in self.values)
        if len(vals) != self.period:
            raise ValueError("need exactly M values")
        object.__setattr__(self, "values", vals)

    def __call__(self, n: int) -> mpc:
        return self.values[n % self.period]

    @property
    def sup_norm(self) -> mpf:
        return max(abs(v) for v in self.values)

    def is_zero(self, tol=None) -> bool:
        if tol is None:
            return all(v == 0 for v in self.values)
        return self.sup_norm < tol

    def scale(self, s) -> "PeriodicFunction":
        with mpmath.workprec(VALUE_BITS):
            return PeriodicFunction(self.period, tuple(s * v for v in self.values))

    def __add__(self, other: "PeriodicFunction") -> "PeriodicFunction":
        if other.period != self.period:
            raise ValueError("period mismatch")
        with mpmath.workprec(VALUE_BITS):
            return PeriodicFunction(self.period,
                                    tuple(a + b for a, b in zip(self.values, other.values)))

    def conj(self) -> "PeriodicFunction":
        return PeriodicFunction(self.period, tuple(mpmath.conj(v) for v in self.values))

    def real_part(self) -> "PeriodicFunction":
        return PeriodicFunction(self.period, tuple(mpc(v.real) for v in self.values))

    def imag_part(self) -> "PeriodicFunction":
        return PeriodicFunction(self.period, tuple(mpc(v.imag) for v in self.values))

    def to_json(self) -> str:
        with mpmath.workprec(VALUE_BITS):
            rows = [[mpmath.nstr(v.real, 160), mpmath.nstr(v.imag, 160)]
                    for v in self.values]
        return json.dumps({"period": self.period, "values": rows})

    @staticmethod
    def from_json(text: str) -> "PeriodicFunction":
        doc = json.loads(text)
        with mpmath.workprec(VALUE_BITS):
            vals = [mpc(mpf(re), mpf(im)) for re, im in doc["values"]]
        return PeriodicFunction(int(doc["period"]), tuple(vals))


def zero_function(M: int = 1) -> PeriodicFunction:
    return PeriodicFunction(M, (0,) * M)


def linf_dist(f: PeriodicFunction, g: PeriodicFunction) -> mpf:
    if f.period != g.period:
        raise ValueError("period mismatch")
    return max(abs(a - b) for a, b in zip(f.values, g.values))


def dft(f: PeriodicFunction) -> PeriodicFunction:
    """Unitary DFT: (U_M f)(n) = M^{-1/2} sum_l f(l) e^{-2 pi i l n / M}."""
    M = f.period
    with mpmath.workprec(VALUE_BITS):
        root = mpmath.sqrt(mpf(M))
        out = []
        for n in range(M):
            acc = mpc(0)
            for ell, v in enumerate(f.values):
                if v == 0:
                    continue
                acc += v * _expjpi(Fraction(-2 * ell * n, M))
            out.append(acc / root)
    return PeriodicFunction(M, tuple(out))


def parity_split(f: PeriodicFunction):
    """(f_ev, f_od) with f_ev(n) = (f(n)+f(-n))/2."""
    M = f.period
    ev, od = [], []
    with mpmath.workprec(VALUE_BITS):
        for n in range(M):
            a, b = f.values[n], f.values[(-n) % M]
            ev.append((a + b) / 2)
            od.append((a - b) / 2)
    return PeriodicFunction(M, tuple(ev)), PeriodicFunction(M, tuple(od))


def mean(f: PeriodicFunction) -> mpc:
    with mpmath.workprec(VALUE_BITS):
        return sum(f.values, mpc(0)) / f.period


def twist_beta(f: PeriodicFunction, beta) -> tuple:
    """(f_beta, M') with f_beta(n) = f(n) e^{i pi n^2 beta}, M' = lcm(M, 2 den(beta))."""
    beta = Fraction(beta)
    M = f.period
    if beta.denominator == 1 and beta.numerator % 2 == 0:
        return f, M
    Mp = math.lcm(M, 2 * beta.denominator)
    with mpmath.workprec(VALUE_BITS):
        vals = tuple(f(n) * _expjpi(n * n * beta) for n in range(Mp))
    return PeriodicFunction(Mp, vals), Mp


def lambda_twist(f: PeriodicFunction, b: int) -> PeriodicFunction:
    """Lambda_M^b f with Lambda_M(n) = e^{i pi n^2 / M}; needs M or b even."""
    M = f.period
    if M % 2 == 1 and b % 2 == 1:
        raise ValueError("M and b both odd: the twist has period 2M, use twist_beta")
    with mpmath.workprec(VALUE_BITS):
        return PeriodicFunction(M, tuple(f(n) * _expjpi(Fraction(n * n * b, M))
                                         for n in range(M)))


def _support(f: PeriodicFunction, span: int):
    tol = mpf(2) ** (-VALUE_BITS // 2)
    scale = f.sup_norm
    if scale == 0:
        return []
    return [n for n in range(span) if abs(f(n)) > tol * scale]


def support_n0(f: PeriodicFunction):
    """Smallest n0 >= 0 with n^2 = n0^2 mod 2M on the support of f, else None."""
    M = f.period
    supp = _support(f, 2 * M)
    if not supp:
        return 0
    sq = {(n * n) % (2 * M) for n in supp}
    if len(sq) != 1:
        return None
    target = sq.pop()
    for n0 in range(2 * M):
        if (n0 * n0) % (2 * M) == target:
            return n0
    return None


EIGEN_TOL = "1e-20"


def eigen_check(f: PeriodicFunction):
    """Eigenvalue in {1,-1,i,-i} with dft(f) = lambda f, or None."""
    if f.is_zero():
        raise ValueError("zero function has no eigenvalue")
    fh = dft(f)
    with mpmath.workprec(VALUE_BITS):
        tol = mpf(EIGEN_TOL)
        for lam in (mpc(1), mpc(-1), mpc(0, 1), mpc(0, -1)):
            if linf_dist(fh, f.scale(lam)) < tol:
                return lam
    return None


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a|n) extending the Jacobi symbol to all integers."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -sign
    # factor out twos from n
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 == 1 and a % 8 in (3, 5):
            sign = -sign
    a %= n
    # Jacobi algorithm on odd n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def _primitive_root(p: int) -> int:
    phi = p - 1
    fac = []
    m = phi
    d = 2
    while d * d <= m:
        if m % d == 0:
            fac.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        fac.append(m)
    for g in range(2, p):
        if all(pow(g, phi // q, p) != 1 for q in fac):
            return g
    raise ValueError("no primitive root")


def conrey_character(q: int, m: int, bits: int = VALUE_BITS) -> PeriodicFunction:
    """Dirichlet character chi_q(m, .) in the Conrey labelling.

    Supports q = p1*...*pk or 4*p1*...*pk with distinct odd primes pi, which
    covers the moduli used here (12, 20, 60).
    """
    if math.gcd(q, m) != 1:
        raise ValueError("label m must be coprime to q")
    factors = []
    rest = q
    if rest % 4 == 0:
        if rest % 8 == 0:
            raise ValueError("modulus divisible by 8 not supported")
        factors.append(4)
        rest //= 4
    elif rest % 2 == 0:
        raise ValueError("modulus 2 mod 4 has no primitive part at 2")
    p = 3
    while rest > 1:
        if rest % p == 0:
            factors.append(p)
            rest //= p
            if rest % p == 0:
                raise ValueError("square factor not supported")
        p += 2
    vals = []
    with mpmath.workprec(bits):
        for n in range(q):
            if math.gcd(n, q) != 1:
                vals.append(mpc(0))
                continue
            acc = mpc(1)
            for fq in factors:
                if fq == 4:
                    if m % 4 == 3 and n % 4 == 3:
                        acc = -acc
                else:
                    g = _primitive_root(fq)
                    a = _dlog(m % fq, g, fq)
                    b = _dlog(n % fq, g, fq)
                    acc *= _expjpi(Fraction(2 * a * b, fq - 1), bits)
            vals.append(acc)
    return PeriodicFunction(q, tuple(vals))


def _dlog(x: int, g: int, p: int) -> int:
    cur = 1
    for k in range(p - 1):
        if cur == x % p:
            return k
        cur = (cur * g) % p
    raise ValueError("discrete log failed")


CATALOG_NAMES = ("jacobi_theta3", "dedekind_eta_char", "rr_f51", "rr_f52",
                 "poincare_fplus", "poincare_fminus")


def catalog(name: str):
    """(nu, PeriodicFunction) for the built-in examples."""
    if name == "jacobi_theta3":
        return 0, PeriodicFunction(1, (1,))
    if name == "dedekind_eta_char":
        return 0, PeriodicFunction(12, tuple(kronecker_symbol(12, n) for n in range(12)))
    if name in ("rr_f51", "rr_f52"):
        chi = conrey_character(20, 7)
        return 0, (chi.real_part() if name == "rr_f51" else chi.imag_part())
    if name in ("poincare_fplus", "poincare_fminus"):
        chi = conrey_character(60, 23)
        return 0, (chi.real_part() if name == "poincare_fplus" else chi.imag_part())
    raise KeyError("unknown catalog name: %s" % name)


def is_dirichlet_character(f: PeriodicFunction, tol=None) -> bool:
    """True when f is totally multiplicative mod M, unit on units, 0 elsewhere."""
    M = f.period
    if tol is None:
        tol = mpf(2) ** (-VALUE_BITS // 4)
    if abs(f(1) - 1) > tol:
        return False
    for n in range(M):
        if math.gcd(n, M) == 1:
            if abs(abs(f(n)) - 1) > tol:
                return False
        elif abs(f(n)) > tol:
            return False
    for a in range(M):
        for b in range(a, M):
            if abs(f(a * b) - f(a) * f(b)) > tol:
                return False
    return True


@dataclass(frozen=True)
class VectorFunction:
    """Pair (f1, f2) with U_M acting as an integer/complex 2x2 matrix J."""

    components: tuple
    j_matrix: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) != 2 or comps[0].period != comps[1].period:
            raise ValueError("need two components with equal period")
        object.__setattr__(self, "components", comps)
        jm = tuple(tuple(mpc(x) for x in row) for row in self.j_matrix)
        object.__setattr__(self, "j_matrix", jm)

    @property
    def period(self) -> int:
        return self.components[0].period


def standard_vector(f: PeriodicFunction, parity: int) -> VectorFunction:
    """F = (f, dft(f)) with J = (0 1; (-1)^parity 0)."""
    return VectorFunction((f, dft(f)), ((0, 1), ((-1) ** parity, 0)))
