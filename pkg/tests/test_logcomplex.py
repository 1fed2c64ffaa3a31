import cmath
import math

import numpy as np
import pytest

from crosscav.logcomplex import LC_ONE, LC_ZERO, LogComplex, lc_add, wrap_phase


def test_wrap_phase_principal_interval():
    assert wrap_phase(math.pi) == math.pi
    assert wrap_phase(-math.pi) == math.pi
    assert wrap_phase(3 * math.pi) == pytest.approx(math.pi)
    assert wrap_phase(0.1 + 6 * math.pi) == pytest.approx(0.1)
    rng = np.random.default_rng(1)
    for phi in rng.uniform(-50, 50, size=200):
        w = wrap_phase(phi)
        assert -math.pi < w <= math.pi
        assert cmath.isclose(cmath.exp(1j * w), cmath.exp(1j * phi),
                             rel_tol=1e-12)


def test_round_trip_within_ulp_scale():
    rng = np.random.default_rng(2)
    for _ in range(500):
        lm = rng.uniform(-300, 300)
        ph = rng.uniform(-math.pi, math.pi)
        lc = LogComplex.from_log(lm, ph)
        back = LogComplex.from_complex(lc.to_complex())
        assert back.log_magnitude == pytest.approx(lm, rel=1e-14, abs=1e-12)
        assert back.phase == pytest.approx(ph, abs=1e-12)


def test_multiplication_adds_fields_exactly():
    a = LogComplex(123.456, 0.25)
    b = LogComplex(-78.9, -0.5)
    prod = a * b
    assert prod.log_magnitude == 123.456 + (-78.9)  # exact float add
    assert prod.phase == wrap_phase(0.25 - 0.5)


def test_multiplication_wraps_phase():
    a = LogComplex(0.0, 3.0)
    b = LogComplex(0.0, 3.0)
    assert -math.pi < (a * b).phase <= math.pi


def test_zero_and_one():
    z = LogComplex.from_complex(0)
    assert z.is_zero()
    assert (z * LC_ONE).is_zero()
    assert LC_ONE.to_complex() == 1.0 + 0j
    assert lc_add(LC_ZERO, LC_ONE) == LC_ONE


def test_division_and_conj():
    a = LogComplex.from_complex(3.0 + 4.0j)
    b = LogComplex.from_complex(1.0 - 2.0j)
    q = (a / b).to_complex()
    assert cmath.isclose(q, (3 + 4j) / (1 - 2j), rel_tol=1e-13)
    assert cmath.isclose(a.conj().to_complex(), 3.0 - 4.0j, rel_tol=1e-13)


def test_lc_add_matches_complex_addition():
    rng = np.random.default_rng(3)
    for _ in range(300):
        za = complex(rng.normal(), rng.normal())
        zb = complex(rng.normal(), rng.normal())
        if za + zb == 0:
            continue
        got = lc_add(LogComplex.from_complex(za),
                     LogComplex.from_complex(zb)).to_complex()
        assert cmath.isclose(got, za + zb, rel_tol=1e-12, abs_tol=1e-15)


def test_lc_add_huge_scales():
    a = LogComplex(500.0, 0.3)
    b = LogComplex(100.0, -1.0)  # negligible vs a
    out = lc_add(a, b)
    assert out.log_magnitude == pytest.approx(500.0)
    assert out.phase == pytest.approx(0.3)
