"""Log-magnitude / phase representation of complex values.

The steady-state series contain factors like (2p)^n / n! and ratios of gamma
functions at |argument| of a few hundred; their magnitudes overflow double
precision long before any physically meaningful *ratio* does.  All series
terms are therefore carried as (log|z|, arg z) pairs, for which
multiplication is exact float addition.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

_TWO_PI = 2.0 * math.pi


def wrap_phase(phi: float) -> float:
    """Wrap an angle into the principal interval (-pi, pi]."""
    phi = math.fmod(phi, _TWO_PI)
    if phi <= -math.pi:
        phi += _TWO_PI
    elif phi > math.pi:
        phi -= _TWO_PI
    return phi


@dataclass(frozen=True)
class LogComplex:
    """z = exp(log_magnitude) * exp(i * phase), phase in (-pi, pi]."""

    log_magnitude: float
    phase: float

    @staticmethod
    def from_complex(z: complex) -> "LogComplex":
        z = complex(z)
        if z == 0:
            return LogComplex(-math.inf, 0.0)
        return LogComplex(math.log(abs(z)), wrap_phase(cmath.phase(z)))

    @staticmethod
    def from_log(log_magnitude: float, phase: float) -> "LogComplex":
        if log_magnitude == -math.inf:
            return LogComplex(-math.inf, 0.0)
        return LogComplex(log_magnitude, wrap_phase(phase))

    def to_complex(self) -> complex:
        # Overflows to inf for log_magnitude > ~709; callers needing huge
        # values must stay in log space.
        return cmath.rect(math.exp(self.log_magnitude), self.phase)

    def is_zero(self) -> bool:
        return self.log_magnitude == -math.inf

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        if self.is_zero() or other.is_zero():
            return LC_ZERO
        return LogComplex(
            self.log_magnitude + other.log_magnitude,
            wrap_phase(self.phase + other.phase),
        )

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        if other.is_zero():
            raise ZeroDivisionError("division by LogComplex zero")
        if self.is_zero():
            return LC_ZERO
        return LogComplex(
            self.log_magnitude - other.log_magnitude,
            wrap_phase(self.phase - other.phase),
        )

    def conj(self) -> "LogComplex":
        return LogComplex(self.log_magnitude, wrap_phase(-self.phase))

    def scaled(self, log_factor: float) -> "LogComplex":
        """Multiply by the positive real number exp(log_factor)."""
        if self.is_zero():
            return LC_ZERO
        return LogComplex(self.log_magnitude + log_factor, self.phase)


LC_ZERO = LogComplex(-math.inf, 0.0)
LC_ONE = LogComplex(0.0, 0.0)


def lc_add(a: LogComplex, b: LogComplex) -> LogComplex:
    """Sum of two log-represented values, rescaled to the larger magnitude."""
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if b.log_magnitude > a.log_magnitude:
        a, b = b, a
    ref = a.log_magnitude
    s = cmath.rect(1.0, a.phase) + cmath.rect(
        math.exp(b.log_magnitude - ref), b.phase
    )
    if s == 0:
        return LC_ZERO
    return LogComplex(ref + math.log(abs(s)), wrap_phase(cmath.phase(s)))
