"""Closed-form expected straight-line distance to the boundary of the unit n-ball."""
from __future__ import annotations

import math
from fractions import Fraction

from escape_lab.errors import InvalidDimension, OutOfRange
from escape_lab.geom import ball_volume, sphere_surface

_LOG_TWO_OVER_SQRT_PI = math.log(2.0) - 0.5 * math.log(math.pi)


def expected_linear_escape(n: int) -> float:
    """Mean exit distance along a straight line from a uniform point of the unit n-ball.

    Equal to ``2/sqrt(pi) * Gamma((n+2)/2) / Gamma((n+3)/2)``, evaluated as a
    log-Gamma difference so large ``n`` does not overflow.
    """
    if n < 1:
        raise InvalidDimension("n must be >= 1")
    return math.exp(_LOG_TWO_OVER_SQRT_PI + math.lgamma(0.5 * (n + 2)) - math.lgamma(0.5 * (n + 3)))


def _gamma_half_integer(k2: int) -> tuple[Fraction, int]:
    """Gamma(k2/2) as ``(q, j)`` meaning ``q * sqrt(pi)**j``."""
    if k2 % 2 == 0:
        return Fraction(math.factorial(k2 // 2 - 1)), 0
    # Gamma(m + 1/2) = (2m)! / (4^m m!) sqrt(pi)
    m = (k2 - 1) // 2
    return Fraction(math.factorial(2 * m), 4**m * math.factorial(m)), 1


def expected_linear_escape_exact(n: int) -> tuple[Fraction, int]:
    """Exact value as ``(q, p)`` meaning ``q * pi**p``, with ``p`` in {0, -1}.

    Odd ``n`` gives a rational number, even ``n`` a rational multiple of 1/pi.
    """
    if n < 1:
        raise InvalidDimension("n must be >= 1")
    num, jn = _gamma_half_integer(n + 2)
    den, jd = _gamma_half_integer(n + 3)
    q = 2 * num / den
    # the leading 2/sqrt(pi) contributes one more factor of pi^(-1/2)
    half_powers = jn - jd - 1
    return q, half_powers // 2


def half_chord_length(r: float) -> float:
    if abs(r) > 1.0:
        raise OutOfRange(f"|r| must be <= 1, got {r}")
    return math.sqrt(1.0 - r * r)


def chord_marginal_density(r: float) -> float:
    """Density of the height of a uniform point of the unit disk."""
    if abs(r) > 1.0:
        raise OutOfRange(f"|r| must be <= 1, got {r}")
    return 2.0 / math.pi * math.sqrt(1.0 - r * r)


def radial_integral(n: int) -> float:
    """Integral of r^(n-2) - r^n over [0, 1]."""
    if n < 2:
        raise InvalidDimension("n must be >= 2")
    return 2.0 / (n * n - 1)


def assemble_expectation(n: int) -> float:
    """Same expectation rebuilt from the ball volume, sphere surface and radial integral."""
    if n < 2:
        raise InvalidDimension("n must be >= 2")
    return 2.0 / ball_volume(n) * sphere_surface(n - 2) * radial_integral(n)
