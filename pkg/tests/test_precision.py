import random
from fractions import Fraction

import gmpy2
import mpmath
import pytest
from mpmath import mpf, mpc

from partialtheta.precision import PrecisionContext, to_g, to_m, mp_str


def test_context_defaults_and_validation():
    ctx = PrecisionContext()
    assert ctx.bits == 256
    assert abs(ctx.target_abs_error - mpf("1e-30")) < mpf("1e-40")
    with pytest.raises(ValueError):
        PrecisionContext(bits=32)
    with pytest.raises(ValueError):
        PrecisionContext(target_abs_error="-1e-5")


def test_with_bits_keeps_target():
    ctx = PrecisionContext(bits=128, target_abs_error="1e-10")
    ctx2 = ctx.with_bits(320)
    assert ctx2.bits == 320
    assert abs(ctx2.target_abs_error - mpf("1e-10")) < mpf("1e-40")


def _random_mpf(rng, prec):
    with mpmath.workprec(prec):
        man = rng.getrandbits(prec) | (1 << (prec - 1))
        x = mpmath.ldexp(mpf(man), rng.randint(-400, 400))
        return -x if rng.random() < 0.5 else x


@pytest.mark.parametrize("prec", [64, 128, 256, 320])
def test_roundtrip_exact_both_directions(prec):
    rng = random.Random(prec)
    for _ in range(50):
        x = _random_mpf(rng, prec)
        g = to_g(x, prec)
        back = to_m(g)
        assert back == x
        z = mpc(x, _random_mpf(rng, prec))
        gz = to_g(z, prec)
        bz = to_m(gz)
        assert bz.real == z.real and bz.imag == z.imag


def test_roundtrip_from_gmpy2_side():
    g = gmpy2.context(precision=200)
    with g:
        x = gmpy2.sqrt(gmpy2.mpfr(2))
        y = to_g(to_m(x), 200)
        assert x == y


def test_fraction_conversion_precision():
    g = to_g(Fraction(1, 3), 256)
    with gmpy2.context(precision=300):
        err = abs(g - gmpy2.mpfr(1) / 3)
        assert err < gmpy2.mpfr(2) ** (-250)


def test_zero_and_special_values():
    assert to_m(gmpy2.mpfr(0)) == 0
    assert to_g(mpf(0), 128) == 0
    assert mpmath.isinf(to_m(gmpy2.inf()))


def test_mp_str_carries_context_digits():
    ctx = PrecisionContext(bits=256)
    with ctx.workprec():
        s = mp_str(mpmath.sqrt(mpf(2)), ctx)
    assert len(s) > 60
    with mpmath.workprec(300):
        assert abs(mpf(s) - mpmath.sqrt(mpf(2))) < mpf("1e-70")
