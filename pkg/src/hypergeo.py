# Copyright 2023 Canonical
# See LICENSE file for licensing details.

"""Hypergeometric series F, F1 and F2, their Euler integrals and the F2 system.

The distinguished parameters (a, b1, b2, c1, c2) = (1/2, 1/4, 1/4, 1/2, 1/2) are exposed as
FIXED_PARAMS; at these values the F2 system is reducible and its solutions are the periods of
the curve w**4 = v**3 (1 - v)(1 - v z).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Optional, Tuple

import numpy as np
from scipy import special

from errors import DomainError, NonConvergent, PoleError
from numerics import (
    DEFAULT_TOLERANCE,
    Tolerance,
    beta_fn,
    integrate_de,
    integrate_de_square,
)

logger = logging.getLogger(__name__)

_MAX_TERMS = 10**6
# F2 is summed over anti-diagonals n = 0..N, (N + 1)(N + 2)/2 terms in all. comb(n, n//2)
# overflows float64 past n = 1020, so N stays at 1000 (501501 terms, within _MAX_TERMS).
_MAX_DIAGONALS = 1000
_CONSECUTIVE_SMALL = 3
_INTEGER_TOLERANCE = 1e-12


def _is_integer(value) -> bool:
    if isinstance(value, (int, Fraction)):
        return Fraction(value).denominator == 1
    value = complex(value)
    return abs(value.imag) < _INTEGER_TOLERANCE and abs(value.real - round(value.real)) < (
        _INTEGER_TOLERANCE
    )


@dataclass(frozen=True)
class F2Params:
    """Parameter tuple (a, b1, b2, c1, c2) of Appell's second system."""

    a: Number
    b1: Number
    b2: Number
    c1: Number
    c2: Number

    def __post_init__(self):
        for name in ("c1", "c2"):
            if _is_integer(getattr(self, name)) and complex(getattr(self, name)).real <= 0:
                raise PoleError(f"{name} = {getattr(self, name)} is a non-positive integer")


FIXED_PARAMS = F2Params(
    Fraction(1, 2), Fraction(1, 4), Fraction(1, 4), Fraction(1, 2), Fraction(1, 2)
)


@dataclass(frozen=True)
class DomainPoint:
    """A point (x1, x2) of the regular locus X."""

    x1: complex
    x2: complex

    def __post_init__(self):
        x1, x2 = complex(self.x1), complex(self.x2)
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "x2", x2)
        if abs(x1 * (1 - x1) * x2 * (1 - x2) * (1 - x1 - x2)) < 1e-15:
            raise DomainError(f"({x1}, {x2}) lies on the singular locus")

    @property
    def z(self) -> complex:
        return (1 - self.x1 - self.x2) / ((1 - self.x1) * (1 - self.x2))

    @property
    def real_chamber(self) -> bool:
        """0 < x1, 0 < x2 and x1 + x2 < 1, with both coordinates real."""
        if self.x1.imag != 0 or self.x2.imag != 0:
            return False
        x1, x2 = self.x1.real, self.x2.real
        return 0 < x1 < 1 and 0 < x2 < 1 and x1 + x2 < 1

    def swapped(self) -> "DomainPoint":
        return DomainPoint(self.x2, self.x1)


def _check_c(c) -> None:
    if _is_integer(c) and complex(c).real <= 0:
        raise PoleError(f"c = {c} is a non-positive integer")


class _StoppingRule:
    """Stop once three consecutive terms are negligible against the partial sum."""

    def __init__(self, tol: Tolerance, what: str):
        self._eps = tol.theta_trunc_eps
        self._small = 0
        self._what = what

    def done(self, term: complex, total: complex) -> bool:
        if abs(term) <= self._eps * abs(total):
            self._small += 1
        else:
            self._small = 0
        return self._small >= _CONSECUTIVE_SMALL

    def give_up(self, count: int):
        logger.error("%s series still not converged after %d terms", self._what, count)
        raise NonConvergent(f"{self._what} series did not converge within {count} terms")


def gauss_f(a, b, c, x, tol: Optional[Tolerance] = None) -> complex:
    """Gauss hypergeometric series F(a, b, c; x) for |x| < 1."""
    tol = tol or DEFAULT_TOLERANCE
    _check_c(c)
    x = complex(x)
    if abs(x) >= 1:
        raise DomainError(f"Gauss series diverges at |x| = {abs(x)}")
    a, b, c = complex(a), complex(b), complex(c)
    term = 1 + 0j
    total = term
    rule = _StoppingRule(tol, "Gauss")
    for n in range(_MAX_TERMS):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * x
        total += term
        if rule.done(term, total):
            logger.debug("gauss_f converged after %d terms", n + 2)
            return total
    rule.give_up(_MAX_TERMS)


def _ratio_sequence(b: complex, c: complex, x: complex, length: int) -> np.ndarray:
    """Return [(b)_k / (c)_k * x**k for k < length]."""
    k = np.arange(length - 1)
    factors = (b + k) / (c + k) * x
    return np.concatenate(([1 + 0j], np.cumprod(factors)))


def _factorial_sequence(b: complex, x: complex, length: int) -> np.ndarray:
    """Return [(b)_k / k! * x**k for k < length]."""
    k = np.arange(length - 1)
    factors = (b + k) / (k + 1) * x
    return np.concatenate(([1 + 0j], np.cumprod(factors)))


def appell_f2(p: F2Params, x1, x2, tol: Optional[Tolerance] = None) -> complex:
    """Appell's F2 double series, summed along the anti-diagonals n1 + n2 = n.

    At most _MAX_DIAGONALS + 1 diagonals are summed; NonConvergent reports the term count.
    """
    tol = tol or DEFAULT_TOLERANCE
    x1, x2 = complex(x1), complex(x2)
    if abs(x1) + abs(x2) >= 1:
        raise DomainError(f"F2 series diverges at |x1| + |x2| = {abs(x1) + abs(x2)}")
    a, b1, b2, c1, c2 = (complex(v) for v in (p.a, p.b1, p.b2, p.c1, p.c2))
    q1 = _ratio_sequence(b1, c1, x1, _MAX_DIAGONALS + 1)
    q2 = _ratio_sequence(b2, c2, x2, _MAX_DIAGONALS + 1)
    # (a)_n / n! times the binomially weighted convolution gives the full diagonal sum.
    a_over_factorial = 1 + 0j
    total = 0j
    rule = _StoppingRule(tol, "Appell F2")
    for n in range(_MAX_DIAGONALS + 1):
        if n > 0:
            a_over_factorial *= (a + n - 1) / n
        k = np.arange(n + 1)
        binomials = special.comb(n, k)
        diagonal = a_over_factorial * complex(np.sum(binomials * q1[: n + 1] * q2[n::-1]))
        total += diagonal
        if rule.done(diagonal, total):
            logger.debug("appell_f2 converged after %d diagonals", n + 1)
            return total
    rule.give_up((_MAX_DIAGONALS + 1) * (_MAX_DIAGONALS + 2) // 2)


def appell_f1(a, b1, b2, c, x1, x2, tol: Optional[Tolerance] = None) -> complex:
    """Appell's F1 double series on the polydisc |x1|, |x2| < 1."""
    tol = tol or DEFAULT_TOLERANCE
    _check_c(c)
    x1, x2 = complex(x1), complex(x2)
    if abs(x1) >= 1 or abs(x2) >= 1:
        raise DomainError(f"F1 series diverges at ({x1}, {x2})")
    a, b1, b2, c = complex(a), complex(b1), complex(b2), complex(c)
    r1 = _factorial_sequence(b1, x1, 64)
    r2 = _factorial_sequence(b2, x2, 64)
    a_over_c = 1 + 0j
    total = 0j
    rule = _StoppingRule(tol, "Appell F1")
    terms = 0
    n = 0
    while terms < _MAX_TERMS:
        if n >= len(r1):
            length = 2 * len(r1)
            r1 = _factorial_sequence(b1, x1, length)
            r2 = _factorial_sequence(b2, x2, length)
        if n > 0:
            a_over_c *= (a + n - 1) / (c + n - 1)
        diagonal = a_over_c * complex(np.sum(r1[: n + 1] * r2[n::-1]))
        total += diagonal
        terms += n + 1
        if rule.done(diagonal, total):
            logger.debug("appell_f1 converged after %d diagonals", n + 1)
            return total
        n += 1
    rule.give_up(terms)


def euler_gauss(a, b, c, x, tol: Optional[Tolerance] = None) -> complex:
    """Euler integral of F(a, b, c; x), valid for Re c > Re b > 0 and x off [1, oo)."""
    x = complex(x)
    b, c = float(b), float(c)

    def integrand(t, da, db):
        return da ** (b - 1) * db ** (c - b - 1) * (1 - t * x) ** (-complex(a))

    value = integrate_de(integrand, 0.0, 1.0, (b - 1, c - b - 1), tol)
    return value / beta_fn(b, c - b)


def euler_f1(a, b1, b2, c, x1, x2, tol: Optional[Tolerance] = None) -> complex:
    """Euler integral of F1(a; b1, b2; c; x1, x2), valid for Re c > Re a > 0."""
    x1, x2 = complex(x1), complex(x2)
    a, c = float(a), float(c)

    def integrand(t, da, db):
        return (
            da ** (a - 1)
            * db ** (c - a - 1)
            * (1 - t * x1) ** (-complex(b1))
            * (1 - t * x2) ** (-complex(b2))
        )

    value = integrate_de(integrand, 0.0, 1.0, (a - 1, c - a - 1), tol)
    return value / beta_fn(a, c - a)


def f2_operators(p: F2Params, x1, x2, derivatives: Tuple) -> Tuple[complex, complex]:
    """Apply the two F2 differential operators to the given partial derivatives.

    `derivatives` is (f, f_1, f_2, f_11, f_12, f_22).
    """
    f, f1, f2, f11, f12, f22 = derivatives
    a, b1, b2, c1, c2 = (complex(v) for v in (p.a, p.b1, p.b2, p.c1, p.c2))
    first = (
        x1 * (1 - x1) * f11
        - x1 * x2 * f12
        + (c1 - (a + b1 + 1) * x1) * f1
        - b1 * x2 * f2
        - a * b1 * f
    )
    second = (
        x2 * (1 - x2) * f22
        - x1 * x2 * f12
        + (c2 - (a + b2 + 1) * x2) * f2
        - b2 * x1 * f1
        - a * b2 * f
    )
    return first, second


def f2_pde_residual(
    p: F2Params, x1, x2, h: float = 1e-4, tol: Optional[Tolerance] = None
) -> Tuple[float, float]:
    """Residuals of the F2 system on appell_f2, by central finite differences."""
    if not 1e-5 <= h <= 1e-3:
        raise DomainError(f"step {h} outside [1e-5, 1e-3]")
    x1, x2 = complex(x1), complex(x2)
    if abs(x1) + abs(x2) > 1 - 4 * h:
        raise DomainError(f"({x1}, {x2}) is within 4h of the boundary of convergence")

    def f(d1: int, d2: int) -> complex:
        return appell_f2(p, x1 + d1 * h, x2 + d2 * h, tol)

    f00 = f(0, 0)
    fp0, fm0, f0p, f0m = f(1, 0), f(-1, 0), f(0, 1), f(0, -1)
    fpp, fpm, fmp, fmm = f(1, 1), f(1, -1), f(-1, 1), f(-1, -1)
    derivatives = (
        f00,
        (fp0 - fm0) / (2 * h),
        (f0p - f0m) / (2 * h),
        (fp0 - 2 * f00 + fm0) / h**2,
        (fpp - fpm - fmp + fmm) / (4 * h**2),
        (f0p - 2 * f00 + f0m) / h**2,
    )
    first, second = f2_operators(p, x1, x2, derivatives)
    return abs(first), abs(second)


def is_reducible(p: F2Params) -> bool:
    """Whether the F2 system with parameters p is reducible."""
    a, b1, b2, c1, c2 = p.a, p.b1, p.b2, p.c1, p.c2
    combinations = (a, b1, b2, b1 - c1, b2 - c2, a - c1, a - c2, a - c1 - c2)
    return any(_is_integer(value) for value in combinations)


_SQUARE_TOLERANCE = Tolerance(abs_eps=1e-11, rel_eps=1e-10, quad_levels=8)


def euler_d1(x1: float, x2: float, tol: Optional[Tolerance] = None) -> complex:
    """Euler double integral of the fixed-parameter F2 system over the unit square D1.

    The integrand t1**(-3/4) (1 - t1)**(-3/4) t2**(-3/4) (1 - t2)**(-3/4)
    (1 - t1 x1 - t2 x2)**(-1/2) is positive on (0, 1)**2 in the real chamber.
    """
    point = DomainPoint(x1, x2)
    if not point.real_chamber:
        raise DomainError(f"({x1}, {x2}) is outside the real chamber")
    x1, x2 = point.x1.real, point.x2.real

    def integrand(t1, s1, t2, s2):
        return (t1 * s1 * t2 * s2) ** -0.75 * (1 - t1 * x1 - t2 * x2) ** -0.5

    return integrate_de_square(integrand, (-0.75,) * 4, tol or _SQUARE_TOLERANCE)
