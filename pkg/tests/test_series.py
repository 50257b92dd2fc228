import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf, mpc

from partialtheta.series import (TruncatedSeries, SeriesError, series_add,
                                 series_mul, series_scale, series_compose,
                                 series_reversion, series_zero)

mpmath.mp.prec = 256


def S(coeffs, offset=0):
    return TruncatedSeries(Fraction(offset), tuple(coeffs))


def test_mul_telescoping():
    a = S([1, 1])
    b = S([1, -1])
    c = series_mul(a, b)
    assert c.offset == 0
    assert c.coeffs == (mpc(1), mpc(0))


def test_add_identity_and_alignment():
    a = S([2, 3, 4])
    z = series_zero(order=2)
    c = series_add(a, z)
    assert c.coeffs == a.coeffs
    # offsets differing by an integer align; result truncates to the overlap
    b = S([5], offset=1)
    c = series_add(a, b)
    assert c.offset == 0
    assert c.coeffs == (mpc(2), mpc(8))


def test_add_rejects_fractional_offset_mismatch():
    a = S([1], offset=Fraction(-1, 2))
    b = S([1], offset=0)
    with pytest.raises(SeriesError):
        series_add(a, b)


def test_compose_exp_of_x_plus_x2():
    # exp(y) to order 4 composed with y = x + x^2 (exact polynomial,
    # passed at order 4): coefficients 1, 1, 3/2, 7/6, 25/24.
    expo = S([1, 1, mpf(1) / 2, mpf(1) / 6, mpf(1) / 24])
    inner = S([0, 1, 1, 0, 0])
    c = series_compose(expo, inner)
    want = [mpf(1), mpf(1), mpf(3) / 2, mpf(7) / 6, mpf(25) / 24]
    assert c.order >= 4
    for j, w in enumerate(want):
        assert abs(c.coeffs[j] - w) < mpf("1e-70")


def test_compose_rejects_constant_term():
    with pytest.raises(SeriesError):
        series_compose(S([1, 1]), S([1, 1]))


def test_mul_matches_convolution_oracle():
    rng = random.Random(7)
    for _ in range(5):
        a = S([mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(9)])
        b = S([mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(9)])
        c = series_mul(a, b)
        for n in range(9):
            oracle = sum(a.coeffs[i] * b.coeffs[n - i] for i in range(n + 1))
            assert abs(c.coeffs[n] - oracle) < mpf("1e-70")


def test_eval_with_half_integer_offset():
    s = S([1, 2], offset=Fraction(-1, 2))
    x = mpf("0.25")
    want = (1 + 2 * x) / mpmath.sqrt(x)
    assert abs(s.eval_at(x) - want) < mpf("1e-70")


def test_coeff_at_slots():
    s = S([3, 4], offset=Fraction(-1, 2))
    assert s.coeff_at(Fraction(-1, 2)) == 3
    assert s.coeff_at(0) == 0  # absent slot between known exponents
    with pytest.raises(SeriesError):
        s.coeff_at(Fraction(5, 2))


def test_reversion_roundtrip():
    # g(tau) = (e^{2 pi i tau} - 1)/(2 pi i): inverse recovers tau from q.
    twopii = mpc(0, 2) * mpmath.pi
    g = S([twopii ** (k - 1) / mpmath.factorial(k) for k in range(1, 9)], offset=1)
    inv = series_reversion(g, 8)
    comp = series_compose(TruncatedSeries(Fraction(0), (0,) + g.coeffs),
                          inv)
    for j in range(min(comp.order, 8) + 1):
        want = 1 if j == 1 else 0
        assert abs(comp.coeffs[j] - want) < mpf("1e-65")


def test_scale():
    s = series_scale(S([1, 2]), mpc(0, 1))
    assert s.coeffs == (mpc(0, 1), mpc(0, 2))
