import cmath
import math

import numpy as np
import pytest

from crosscav.logcomplex import LogComplex
from crosscav.specfun import (GammaPoleError, Hyp1f1ConvergenceError,
                              complex_binomial, kummer_1f1, log_gamma,
                              tricomi_u)

# --- log_gamma -----------------------------------------------------------


def test_log_gamma_trivial_values():
    assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-14)
    assert log_gamma(5.0).real == pytest.approx(math.log(24.0), rel=1e-14)
    assert log_gamma(5.0).imag == 0.0


def test_log_gamma_complex_oracle():
    # frozen from a 50-digit arbitrary-precision evaluation
    got = log_gamma(0.5 + 3.0j)
    assert got.real == pytest.approx(-3.7934504504362231734, rel=1e-13)
    assert got.imag == pytest.approx(0.30981927108643916606, rel=1e-13)


def test_log_gamma_accuracy_band():
    # exp(log_gamma) vs gamma to 1e-12 relative away from poles, |z| <= 1e3
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 40
    rng = np.random.default_rng(11)
    for _ in range(60):
        z = complex(rng.uniform(-1000, 1000), rng.uniform(-1000, 1000))
        if abs(z.imag) < 0.5 and z.real < 0.5:
            continue  # keep away from the pole line
        got = log_gamma(z)
        ref = complex(mpmath.loggamma(mpmath.mpc(z.real, z.imag)))
        # identical branch: compare the log directly
        assert got.real == pytest.approx(ref.real, rel=1e-12, abs=1e-12)
        assert got.imag == pytest.approx(ref.imag, rel=1e-12, abs=1e-10)


def test_log_gamma_pole_error():
    for z in (0.0, -1.0, -7.0):
        with pytest.raises(GammaPoleError) as err:
            log_gamma(z)
        assert str(int(z)) in str(err.value)


# --- kummer_1f1 ----------------------------------------------------------


def test_kummer_a_equals_b_gives_exp():
    for a, z in ((2.0 + 1.0j, 3.5), (0.7 - 0.2j, 17.0), (5.0, 250.0)):
        out = kummer_1f1(a, a, z)
        assert out.log_magnitude == pytest.approx(z, rel=1e-12)
        assert out.phase == pytest.approx(0.0, abs=1e-12)


def test_kummer_z_zero_is_one():
    out = kummer_1f1(1.5 + 2.0j, -0.5 + 1.0j, 0.0)
    assert out.log_magnitude == 0.0
    assert out.phase == 0.0


def test_kummer_complex_oracle():
    # frozen from a 200-term extended-precision summation of the series
    out = kummer_1f1(2.0 + 1.0j, 3.0 - 2.0j, 1.5)
    assert out.log_magnitude == pytest.approx(0.58313383052709797924,
                                              rel=1e-12)
    assert out.phase == pytest.approx(0.90126947723638465924, rel=1e-12)


def test_kummer_terminating_series():
    # a = -2 terminates: 1 - 2 z / b + z^2 (a)(a+1)/(b(b+1)) / 2
    b = 1.7 + 0.3j
    z = 2.5
    expected = 1.0 + (-2.0) / b * z + (-2.0) * (-1.0) / (b * (b + 1.0)) \
        * z * z / 2.0
    got = kummer_1f1(-2.0, b, z).to_complex()
    assert cmath.isclose(got, expected, rel_tol=1e-13)


def test_kummer_pole_in_b():
    with pytest.raises(GammaPoleError):
        kummer_1f1(1.5, -2.0, 1.0)
    # terminating numerator protects the pole: a=-1 stops before b+k = 0
    out = kummer_1f1(-1.0, -3.0, 2.0)
    assert cmath.isclose(out.to_complex(), 1.0 + 2.0 / 3.0, rel_tol=1e-13)


def test_kummer_nonconvergence_diagnostics():
    with pytest.raises(Hyp1f1ConvergenceError) as err:
        kummer_1f1(2.0 + 1.0j, 3.0 + 0.5j, 50.0, max_terms=10)
    exc = err.value
    assert exc.terms == 10
    assert math.isfinite(exc.partial.log_magnitude)
    assert exc.last_ratio > 0


def test_kummer_recurrence_consistency():
    # 1F1(a,b;z) = 1F1(a+1,b;z) - (z/b) 1F1(a+1,b+1;z), 100 random draws
    rng = np.random.default_rng(101)
    checked = 0
    while checked < 100:
        a = complex(rng.uniform(-20, 20), rng.uniform(-20, 20))
        b = complex(rng.uniform(-20, 20), rng.uniform(-20, 20))
        z = float(rng.uniform(-20, 20))
        if abs(b.imag) < 0.3 or abs(b + 1).real < 0.3:
            continue  # keep clear of near-pole amplification
        lhs = kummer_1f1(a, b, z).to_complex()
        rhs = kummer_1f1(a + 1.0, b, z).to_complex() \
            - (z / b) * kummer_1f1(a + 1.0, b + 1.0, z).to_complex()
        scale = max(abs(lhs), abs(rhs), 1e-10)
        assert abs(lhs - rhs) / scale < 1e-10, (a, b, z)
        checked += 1


# --- tricomi_u -----------------------------------------------------------


def test_tricomi_a_zero_is_one():
    out = tricomi_u(0.0, 1.5, 2.0 + 1.0j)
    assert out.log_magnitude == pytest.approx(0.0, abs=1e-14)
    assert out.phase == pytest.approx(0.0, abs=1e-14)


def test_tricomi_terminating_oracle():
    # U(-n, b, z) = (-1)^n n! L_n^{(b-1)}(z); frozen reference values
    assert tricomi_u(-1.0, 1.5, 2.0).to_complex() == pytest.approx(0.5,
                                                                   rel=1e-13)
    assert tricomi_u(-2.0, 1.5, 1.0).to_complex() == pytest.approx(-0.25,
                                                                   rel=1e-12)


def test_tricomi_against_mpmath():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 30
    cases = [(-3.0, 1.5, 2.5), (-0.5, 1.5, 3.0 + 1.0j), (0.7, 0.4, 2.0),
             (-7.5, 1.5, 10.0), (1.2 + 0.5j, 0.25, 4.0)]
    for a, b, z in cases:
        got = tricomi_u(a, b, z).to_complex()
        ref = complex(mpmath.hyperu(a, b, z))
        assert cmath.isclose(got, ref, rel_tol=1e-9), (a, b, z, got, ref)


def test_tricomi_half_integer_family():
    # the a = (n+1-2N)/2, b = 3/2 family reduces to terminating polynomials
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 30
    two_n = 8
    z = 5.0 - 2.0j
    for n in range(two_n + 1):
        a = (n + 1 - two_n) / 2.0
        got = tricomi_u(a, 1.5, z).to_complex()
        ref = complex(mpmath.hyperu(a, 1.5, z))
        assert cmath.isclose(got, ref, rel_tol=1e-9), (n, a, got, ref)


def test_tricomi_polynomial_vs_connection_overlap():
    # terminating branch vs the connection formula in the a -> -n limit;
    # the difference scales linearly in eps
    b = 1.7  # non-integer so the connection formula applies
    z = 3.0
    for n in (1, 2, 3):
        poly = tricomi_u(float(-n), b, z).to_complex()
        for eps in (1e-6, -1e-6):
            near = tricomi_u(-n + eps, b, z).to_complex()
            assert abs(near - poly) / abs(poly) < 1e-3, (n, eps)
        for eps in (1e-11, -1e-11):
            near = tricomi_u(-n + eps, b, z).to_complex()
            assert abs(near - poly) / abs(poly) < 1e-8, (n, eps)


def test_tricomi_integer_b_rejected():
    with pytest.raises(ValueError, match="integer b"):
        tricomi_u(0.3 + 0.1j, 2.0, 1.5)


def test_tricomi_zero_z_rejected():
    with pytest.raises(ValueError):
        tricomi_u(-1.0, 1.5, 0.0)


# --- complex_binomial ----------------------------------------------------


def test_binomial_integer_exact():
    # exact integer path: log of the exact value, phase exactly zero
    out = complex_binomial(5.0, 2)
    assert out.log_magnitude == math.log(10.0)
    assert out.phase == 0.0
    assert out.to_complex() == pytest.approx(10.0, rel=1e-15)
    assert complex_binomial(200.0, 100).log_magnitude == pytest.approx(
        math.log(math.comb(200, 100)), rel=1e-14)


def test_binomial_k_zero():
    assert complex_binomial(2.5 + 1.0j, 0).to_complex() == 1.0 + 0.0j


def test_binomial_vanishes_on_pole():
    # theta-k+1 at a gamma pole while theta+1 regular -> exactly zero
    out = complex_binomial(3.0, 5)
    assert out.is_zero()


def test_binomial_negative_integer_theta():
    # both gammas are poles; the ratio is the finite falling factorial
    assert complex_binomial(-2.0, 3).to_complex() == pytest.approx(-4.0)


def test_binomial_complex_oracle():
    # theta (theta-1) (theta-2) / 6, frozen from exact arithmetic
    got = complex_binomial(3.5 + 2.0j, 3).to_complex()
    assert cmath.isclose(got, -2.8125 + 4.5833333333333333333j,
                         rel_tol=1e-12)


def test_binomial_falling_factorial_property():
    rng = np.random.default_rng(77)
    for _ in range(40):
        theta = complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
        if abs(theta - round(theta.real)) < 1e-6 and abs(theta.imag) < 1e-6:
            continue
        k = int(rng.integers(1, 31))
        binom_kfact = complex_binomial(theta, k) * \
            LogComplex.from_complex(complex(math.factorial(k)))
        ff = 1.0 + 0.0j
        for i in range(k):
            ff *= theta - i
        got = binom_kfact.to_complex()
        assert cmath.isclose(got, ff, rel_tol=1e-10), (theta, k)
