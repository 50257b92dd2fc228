import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf, mpc

from partialtheta.precision import PrecisionContext, NonConvergent
from partialtheta.periodic import PeriodicFunction, catalog
from partialtheta.series import TruncatedSeries
from partialtheta.theta import (ThetaSpec, truncation_index, theta_eval,
                                lvalues, asymptotic_series, twisted_function,
                                asymptotic_series_at, qbar_membership,
                                boundary_value, compose_q_variable,
                                IndeterminateMembership)

mpmath.mp.prec = 300

CTX = PrecisionContext(bits=256)
ONE = PeriodicFunction(1, (1,))
CHI12 = catalog("dedekind_eta_char")[1]


def test_truncation_index_certifies_tail():
    spec = ThetaSpec(0, ONE)
    N = truncation_index(spec, mpf("0.01"), CTX)
    # the next term alone must already be below target
    with mpmath.workprec(400):
        nxt = mpmath.exp(-mpmath.pi * (N + 1) ** 2 * mpf("0.01"))
        assert nxt < CTX.target_abs_error
    # shrinking y grows N
    assert truncation_index(spec, mpf("0.001"), CTX) > N


def test_truncation_budget_exceeded():
    spec = ThetaSpec(0, ONE)
    with pytest.raises(NonConvergent):
        truncation_index(spec, mpf("1e-14"), CTX)


def test_theta_eval_classical_anchor():
    # 1 + 2 Theta(i) is the third Jacobi function at q = e^{-pi}
    val = 1 + 2 * theta_eval(ThetaSpec(0, ONE), mpc(0, 1), CTX)
    with mpmath.workprec(400):
        want = mpmath.jtheta(3, 0, mpmath.exp(-mpmath.pi))
        assert abs(val - want) < mpf("1e-29")


def test_theta_eval_inversion_full_series():
    # 1 + 2 Theta(tau) = (tau/i)^{-1/2} (1 + 2 Theta(-1/tau)) for f = 1
    for tau in (mpc(0, mpf(1) / 3), mpc("0.5", "0.4")):
        lhs = 1 + 2 * theta_eval(ThetaSpec(0, ONE), tau, CTX)
        rhs = (1 + 2 * theta_eval(ThetaSpec(0, ONE), -1 / tau, CTX)) \
            / mpmath.sqrt(tau / mpc(0, 1))
        assert abs(lhs - rhs) < mpf("1e-29")


def test_theta_eval_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        theta_eval(ThetaSpec(0, ONE), mpc(0, -1), CTX)


def test_theta_eval_zero_function():
    from partialtheta.periodic import zero_function
    assert theta_eval(ThetaSpec(2, zero_function(3)), mpc(0, 1), CTX) == 0


def test_theta_eval_weighted():
    # nu = 2 sum against a short direct loop at high precision
    rng = random.Random(4)
    f = PeriodicFunction(3, tuple(mpc(rng.uniform(-1, 1)) for _ in range(3)))
    spec = ThetaSpec(2, f)
    tau = mpc("0.2", "1.5")
    with mpmath.workprec(400):
        want = mpc(0)
        for n in range(1, 200):
            want += mpf(n) ** 2 * f(n) * mpmath.expjpi(n * n * tau / 3)
    assert abs(theta_eval(spec, tau, CTX) - want) < mpf("1e-29")


def test_lvalues_consistent_with_single_values():
    from partialtheta.genfun import lvalue
    ells = lvalues(CHI12, 6)
    for k in range(7):
        assert abs(ells[k] - lvalue(CHI12, k)) < mpf("1e-90")


def test_asymptotic_series_leading_terms():
    # Theta~(tau; 1, chi12) = L(-1,chi12) + L(-3,chi12)(pi i/12) tau + ...
    ser = asymptotic_series(ThetaSpec(1, CHI12), 3)
    ells = lvalues(CHI12, 7)
    with mpmath.workprec(400):
        assert abs(ser.coeffs[0] - ells[1]) < mpf("1e-80")
        z = mpc(0, 1) * mpmath.pi / 12
        assert abs(ser.coeffs[1] - ells[3] * z) < mpf("1e-80")
        assert abs(ser.coeffs[2] - ells[5] * z * z / 2) < mpf("1e-80")


def test_asymptotic_series_approximates_theta_near_zero():
    # optimal-order truncation error is exponentially small in 1/|tau|
    spec = ThetaSpec(1, CHI12)
    tau = mpc(0, mpf(1) / 64)
    val = theta_eval(spec, tau, CTX)
    ser = asymptotic_series(spec, 20)
    errs = []
    for P in range(21):
        part = TruncatedSeries(Fraction(0), ser.coeffs[:P + 1])
        errs.append(abs(val - part.eval_at(tau)))
    best = min(errs)
    # optimal truncation is exponentially accurate and beats low orders
    assert best < mpf("1e-6")
    assert best < errs[0] / 100
    # the error is eventually divergent again (factorial growth)
    assert errs[-1] > best


def test_twisted_function_period():
    ft, Mp = twisted_function(ThetaSpec(0, ONE), Fraction(1, 2))
    assert Mp == 4
    with mpmath.workprec(400):
        assert abs(ft(1) - mpmath.expjpi(mpf(1) / 2)) < mpf("1e-80")


def test_asymptotic_series_at_twisted_point():
    # Theta(alpha + tau) ~ series of the twisted data, same variable tau
    spec = ThetaSpec(0, ONE)
    alpha = Fraction(1)
    ser = asymptotic_series_at(spec, alpha, 6)
    tau = mpc(0, mpf(1) / 40)
    val = theta_eval(spec, alpha + tau, CTX)
    # the remainder is of the order of the first gap term e^{-pi/(4y)}
    assert abs(val - ser.eval_at(tau)) < mpf("1e-12")


def test_qbar_membership():
    assert qbar_membership(ThetaSpec(1, CHI12), 0) is True
    assert qbar_membership(ThetaSpec(0, ONE), 0) is False
    assert qbar_membership(ThetaSpec(0, ONE), 1) is True


def test_qbar_membership_indeterminate_band():
    f = PeriodicFunction(1, (mpf("1e-15"),))
    with pytest.raises(IndeterminateMembership):
        qbar_membership(ThetaSpec(0, f), 0)


def test_boundary_value():
    # f = 1 twisted by alpha = 1 gives the alternating sign sequence;
    # its L(0) is -eta(0) = -1/2
    val = boundary_value(ThetaSpec(0, ONE), 1)
    assert abs(val + mpf(1) / 2) < mpf("1e-80")
    assert boundary_value(ThetaSpec(0, ONE), 0) is None


def test_boundary_value_matches_radial_limit():
    # Theta(1 + iy) approaches L(0, f_1) with a correction O(y)
    spec = ThetaSpec(0, ONE)
    lim = boundary_value(spec, 1)
    for y in (mpf("0.01"), mpf("0.005")):
        v = theta_eval(spec, 1 + mpc(0, y), CTX)
        assert abs(v - lim) < 2 * y


def test_compose_q_variable_inverse_exponential():
    # tau itself, recomposed in Q = (e^{2 pi i tau} - 1)/(2 pi i), must give
    # the series of log(1 + 2 pi i Q)/(2 pi i)
    P = 6
    ser = TruncatedSeries(Fraction(0), (0, 1) + (0,) * (P - 1))
    out = compose_q_variable(ser, P)
    with mpmath.workprec(400):
        twopii = mpc(0, 2) * mpmath.pi
        want = [mpf(0)] + [(-twopii) ** (k - 1) / k for k in range(1, P + 1)]
        for k in range(P + 1):
            assert abs(out.coeffs[k] - want[k]) < mpf("1e-60")


def test_compose_q_variable_validation():
    ser = TruncatedSeries(Fraction(1), (1, 2))
    with pytest.raises(ValueError):
        compose_q_variable(ser, 1)
    ser0 = TruncatedSeries(Fraction(0), (1, 2))
    with pytest.raises(ValueError):
        compose_q_variable(ser0, 5)
