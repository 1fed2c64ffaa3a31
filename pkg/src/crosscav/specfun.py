"""Complex-valued special functions for the steady-state series.

Covers exactly what the analytic solver needs: the principal-branch complex
log-gamma, the Kummer function 1F1 with complex parameters, the Tricomi
function U restricted to the parameter families that occur here, and the
generalized binomial coefficient.  Results that can span thousands of orders
of magnitude are returned as LogComplex.
"""

from __future__ import annotations

import cmath
import math

from scipy.special import loggamma as _scipy_loggamma

from ._kernels import MAX_TERMS_1F1, TOL_1F1, hyp1f1_log
from .logcomplex import LC_ONE, LC_ZERO, LogComplex, lc_add


class GammaPoleError(ValueError):
    """Raised when an argument sits on a gamma-function pole."""


class Hyp1f1ConvergenceError(RuntimeError):
    """Kummer series hit the term cap without converging."""

    def __init__(self, a, b, z, partial: LogComplex, last_ratio: float,
                 terms: int):
        self.a = a
        self.b = b
        self.z = z
        self.partial = partial
        self.last_ratio = last_ratio
        self.terms = terms
        super().__init__(
            f"1F1(a={a}, b={b}; z={z}) did not converge within {terms} "
            f"terms (last |term|/|sum| = {last_ratio:.3e}); "
            f"partial sum log-magnitude {partial.log_magnitude:.6g}"
        )


def _is_nonpos_int(x: complex) -> bool:
    x = complex(x)
    return x.imag == 0.0 and x.real == math.floor(x.real) and x.real <= 0.0


def log_gamma(z: complex) -> complex:
    """Principal-branch log Gamma(z); raises GammaPoleError on the poles."""
    z = complex(z)
    if _is_nonpos_int(z):
        raise GammaPoleError(f"log_gamma pole at z = {int(z.real)}")
    return complex(_scipy_loggamma(z))


def kummer_1f1(a: complex, b: complex, z: float,
               rtol: float = TOL_1F1,
               max_terms: int = MAX_TERMS_1F1) -> LogComplex:
    """Confluent hypergeometric 1F1(a, b; z) as a LogComplex.

    The series terminates when a is a non-positive integer; b at a
    non-positive integer is a pole unless the series terminates first.
    For Re z < 0 (non-terminating a) the alternating direct series cancels
    catastrophically, so the reflection 1F1(a,b;z) = e^z 1F1(b-a,b;-z) is
    applied first and the same term recurrence runs at positive argument.
    """
    a = complex(a)
    b = complex(b)
    z = complex(z)
    reflect = z.real < 0.0 and not _is_nonpos_int(a)
    if reflect:
        logmag, phase, terms, ratio, status = hyp1f1_log(
            b - a, b, -z, rtol, max_terms)
        logmag += z.real
        phase += z.imag
    else:
        logmag, phase, terms, ratio, status = hyp1f1_log(
            a, b, z, rtol, max_terms)
    if status == 2:
        raise GammaPoleError(
            f"1F1 pole: b = {b} is a non-positive integer and the series "
            f"does not terminate first (a = {a})")
    if status == 1:
        raise Hyp1f1ConvergenceError(
            a, b, z, LogComplex.from_log(logmag, phase), ratio, terms)
    return LogComplex.from_log(logmag, phase)


def _pochhammer_log_signed(c: float, j: int) -> tuple[float, int]:
    """(log |(c)_j|, number of negative factors) for real c.

    A zero factor means (c)_j = 0, i.e. c is a non-positive integer with
    |c| < j; the terminating U formula is singular there.
    """
    lmag = 0.0
    neg = 0
    for i in range(j):
        fac = c + i
        if fac == 0.0:
            raise ValueError(
                f"tricomi_u: Pochhammer ({c})_{j} vanishes; integer-b "
                "degenerate case, evaluate by a parameter limit")
        if fac < 0.0:
            neg += 1
        lmag += math.log(abs(fac))
    return lmag, neg


def tricomi_u(a: complex, b: float, z: complex,
              rtol: float = TOL_1F1,
              max_terms: int = MAX_TERMS_1F1) -> LogComplex:
    """Tricomi U(a, b, z) for the families used by the Kerr-free branch.

    Terminating fast paths (exact polynomials):
      * a = -j non-positive integer:     U = (-1)^j (b)_j 1F1(-j, b; z)
      * a - b + 1 = -j non-positive int: U = Gamma(b-1)/Gamma(a)
                                             * z^{1-b} 1F1(-j, 2-b; z)
    Otherwise the standard two-term 1F1 connection formula, which requires a
    non-integer b.
    """
    a = complex(a)
    b = float(b)
    z = complex(z)
    if z == 0:
        raise ValueError("tricomi_u requires z != 0")

    if _is_nonpos_int(a):
        j = int(-a.real)
        body = kummer_1f1(complex(-j), complex(b), z, rtol, max_terms)
        lpoch, sign_flips = _pochhammer_log_signed(b, j)
        return LogComplex.from_log(
            body.log_magnitude + lpoch,
            body.phase + (j + sign_flips) * math.pi)

    a1 = a - b + 1.0
    if _is_nonpos_int(a1):
        if b == math.floor(b):
            raise ValueError(
                "tricomi_u: integer b with non-terminating a; evaluate the "
                "terminating branch (a a non-positive integer) or take a "
                "parameter limit instead")
        j = int(-a1.real)
        body = kummer_1f1(complex(-j), complex(2.0 - b), z, rtol, max_terms)
        lcoef = log_gamma(b - 1.0) - log_gamma(a)
        lz = (1.0 - b) * cmath.log(z)
        return LogComplex.from_log(
            body.log_magnitude + lcoef.real + lz.real,
            body.phase + lcoef.imag + lz.imag)

    if b == math.floor(b):
        raise ValueError(
            "tricomi_u: the two-term connection formula is singular for "
            "integer b; use the terminating branch or a parameter limit")
    t1 = kummer_1f1(a, complex(b), z, rtol, max_terms)
    c1 = log_gamma(1.0 - b) - log_gamma(a1)
    t2 = kummer_1f1(a1, complex(2.0 - b), z, rtol, max_terms)
    c2 = log_gamma(b - 1.0) - log_gamma(a)
    lz = (1.0 - b) * cmath.log(z)
    lc1 = LogComplex.from_log(t1.log_magnitude + c1.real, t1.phase + c1.imag)
    lc2 = LogComplex.from_log(t2.log_magnitude + c2.real + lz.real,
                              t2.phase + c2.imag + lz.imag)
    return lc_add(lc1, lc2)


def complex_binomial(theta: complex, k: int) -> LogComplex:
    """binom(theta, k) = Gamma(theta+1) / (Gamma(k+1) Gamma(theta-k+1)).

    Exact for integer theta >= k; exactly zero when theta-k+1 sits on a
    gamma pole while theta+1 does not (vanishing binomial).
    """
    if k < 0:
        return LC_ZERO
    k = int(k)
    if k == 0:
        return LC_ONE
    theta = complex(theta)
    if theta.imag == 0.0 and theta.real == math.floor(theta.real):
        ti = int(theta.real)
        if ti >= 0:
            if k > ti:
                return LC_ZERO  # theta-k+1 pole, theta+1 regular
            return LogComplex.from_complex(complex(math.comb(ti, k)))
        # negative integer theta: both gammas are poles, ratio is the
        # finite falling factorial
        prod = 1.0
        for i in range(k):
            prod *= (ti - i)
        return LogComplex.from_complex(complex(prod / math.factorial(k)))
    lg = log_gamma(theta + 1.0) - math.lgamma(k + 1.0) \
        - log_gamma(theta - k + 1.0)
    return LogComplex.from_log(lg.real, lg.imag)
