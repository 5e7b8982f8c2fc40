# Copyright 2023 Canonical
# See LICENSE file for licensing details.

"""Numerical building blocks shared by every other module.

Provides the tolerance model, exact unit phases e(q) = exp(2*pi*i*q), Gamma and Beta
functions, tanh-sinh (double-exponential) quadrature for integrands with algebraic endpoint
singularities, and arithmetic on complex tori C/(Z*tau + Z).
"""

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import special

from errors import DomainError, NonConvergent, PoleError

logger = logging.getLogger(__name__)

# Integrand signature: f(t, t - a, b - t) -> values, all numpy arrays.
Integrand = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]

# Smallest endpoint distance a quadrature node may sit at.
_MIN_NODE_DISTANCE = 1e-300


class Tolerance(BaseModel):
    """Accuracy targets for quadrature, series and theta truncation."""

    model_config = ConfigDict(frozen=True)

    abs_eps: float = Field(default=1e-12, gt=0)
    rel_eps: float = Field(default=1e-11, gt=0)
    quad_levels: int = Field(default=12, ge=1, le=16)
    theta_trunc_eps: float = Field(default=1e-16, gt=0)

    def target(self, value: complex) -> float:
        """Return the admissible error for a result of the given size."""
        return max(self.abs_eps, self.rel_eps * abs(value))


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True)
class UnitPhase:
    """The root of unity e(q) = exp(2*pi*i*q) for a rational q."""

    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q) % 1)

    def value(self) -> complex:
        # Exact values at multiples of 1/8 keep phases like e(3/8) free of rounding drift.
        eighths = self.q * 8
        if eighths.denominator == 1:
            return _EIGHTH_ROOTS[int(eighths)]
        return cmath.exp(2j * math.pi * float(self.q))

    def __mul__(self, other: "UnitPhase") -> "UnitPhase":
        return UnitPhase(self.q + other.q)

    def conjugate(self) -> "UnitPhase":
        return UnitPhase(-self.q)


_SQRT_HALF = math.sqrt(0.5)
_EIGHTH_ROOTS = (
    1 + 0j,
    complex(_SQRT_HALF, _SQRT_HALF),
    1j,
    complex(-_SQRT_HALF, _SQRT_HALF),
    -1 + 0j,
    complex(-_SQRT_HALF, -_SQRT_HALF),
    -1j,
    complex(_SQRT_HALF, -_SQRT_HALF),
)


def e_phase(q: Union[Fraction, int, str]) -> complex:
    """Shorthand for UnitPhase(q).value()."""
    return UnitPhase(Fraction(q)).value()


def _is_nonpositive_integer(a: complex) -> bool:
    a = complex(a)
    return a.imag == 0 and a.real <= 0 and float(a.real).is_integer()


def gamma_fn(a: complex) -> complex:
    """Gamma function on the complex plane."""
    if _is_nonpositive_integer(a):
        raise PoleError(f"Gamma has a pole at {a}")
    a = complex(a)
    if a.imag == 0:
        return complex(special.gamma(a.real))
    return complex(special.gamma(a))


def beta_fn(a: complex, b: complex) -> complex:
    """Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)."""
    if _is_nonpositive_integer(a) or _is_nonpositive_integer(b):
        raise PoleError(f"Beta has a pole at ({a}, {b})")
    a, b = complex(a), complex(b)
    if _is_nonpositive_integer(a + b):
        return 0j
    if a.imag == 0 and b.imag == 0:
        return complex(special.beta(a.real, b.real))
    return complex(np.exp(special.loggamma(a) + special.loggamma(b) - special.loggamma(a + b)))


def _tmax_for(exponent: float, tol: Tolerance) -> float:
    """Half-width of the tanh-sinh parameter range for one singular endpoint.

    The neglected tail near an endpoint with behaviour d**e integrates to d**(1+e)/(1+e);
    the range is widened until that tail falls well below the absolute tolerance.
    """
    if exponent <= -1:
        raise DomainError(f"Endpoint exponent {exponent} is not integrable")
    power = 1.0 + min(exponent, 0.0)
    log_d = (math.log(1e-3 * tol.abs_eps * power)) / power
    log_d = max(log_d, math.log(_MIN_NODE_DISTANCE))
    # 1 - tanh(pi/2 sinh t) ~ 2 exp(-pi sinh t)
    return math.asinh((math.log(2.0) - log_d) / math.pi)


def _de_nodes(level: int, tmax: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes added at the given refinement level on the reference interval (-1, 1).

    Returns the distances to the left and right end together with the weights. Level 0 holds
    every integer multiple of h = 1; level k adds the odd multiples of h = 2**-k.
    """
    h = 2.0**-level
    count = int(math.ceil(tmax / h))
    j = np.arange(-count, count + 1)
    if level > 0:
        j = j[j % 2 != 0]
    t = j * h
    u = 0.5 * math.pi * np.sinh(t)
    # 1 + x and 1 - x for x = tanh(u), without cancellation
    left = 2.0 * special.expit(2.0 * u)
    right = 2.0 * special.expit(-2.0 * u)
    weights = 0.5 * math.pi * np.cosh(t) * left * right
    keep = (left > _MIN_NODE_DISTANCE) & (right > _MIN_NODE_DISTANCE)
    return left[keep], right[keep], weights[keep]


def _finish(estimates: list, tol: Tolerance, what: str) -> complex:
    value = estimates[-1]
    error = abs(estimates[-1] - estimates[-2])
    if error <= 10 * tol.target(value):
        logger.warning(
            "%s accepted at max depth with error %.3e above target %.3e",
            what,
            error,
            tol.target(value),
        )
        return value
    logger.error("%s did not converge: error %.3e after %d levels", what, error, len(estimates))
    raise NonConvergent(f"{what} did not converge: last refinement changed it by {error:.3e}")


def integrate_de(
    f: Integrand,
    a: float,
    b: float,
    singular_exponents: Tuple[float, float] = (0.0, 0.0),
    tol: Optional[Tolerance] = None,
) -> complex:
    """Integrate f over the finite interval (a, b) by tanh-sinh quadrature.

    The integrand is called with three arrays: the nodes t, their distance t - a to the left
    end and their distance b - t to the right end. The distances are exact to machine
    precision even when a node sits extremely close to an endpoint, so factors such as
    (1 - t)**(-1/4) should be formed from them. Infinite intervals must be mapped to a
    finite one by the caller.
    """
    tol = tol or DEFAULT_TOLERANCE
    if not a < b:
        raise DomainError(f"Empty or reversed interval ({a}, {b})")
    half = 0.5 * (b - a)
    tmax = max(_tmax_for(e, tol) for e in singular_exponents)

    def level_sum(level: int) -> complex:
        left, right, weights = _de_nodes(level, tmax)
        da = half * left
        db = half * right
        t = np.where(left <= right, a + da, b - db)
        values = np.asarray(f(t, da, db))
        return complex(np.sum(weights * values))

    total = level_sum(0)
    estimates = [half * total]
    for level in range(1, tol.quad_levels + 1):
        h = 2.0**-level
        # Running sum of w*f over all nodes so far; the estimate is h times that sum.
        total += level_sum(level)
        estimates.append(half * h * total)
        error = abs(estimates[-1] - estimates[-2])
        logger.debug("tanh-sinh level %d: %r (change %.3e)", level, estimates[-1], error)
        if level >= 3 and error <= tol.target(estimates[-1]):
            return estimates[-1]
    return _finish(estimates, tol, "tanh-sinh quadrature")


def integrate_de_square(
    f: Callable[..., np.ndarray],
    exponents: Tuple[float, float, float, float],
    tol: Optional[Tolerance] = None,
    max_levels: int = 8,
) -> complex:
    """Tensor-product tanh-sinh quadrature over the unit square (0, 1)**2.

    The integrand receives (t1, 1 - t1, t2, 1 - t2) as broadcastable arrays. `exponents` holds
    the singular exponents at t1 = 0, t1 = 1, t2 = 0 and t2 = 1.
    """
    tol = tol or DEFAULT_TOLERANCE
    tmax1 = max(_tmax_for(e, tol) for e in exponents[:2])
    tmax2 = max(_tmax_for(e, tol) for e in exponents[2:])
    levels = min(tol.quad_levels, max_levels)

    def axis(level: int, tmax: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        parts = [_de_nodes(k, tmax) for k in range(level + 1)]
        left = np.concatenate([p[0] for p in parts])
        right = np.concatenate([p[1] for p in parts])
        weights = np.concatenate([p[2] for p in parts])
        return 0.5 * left, 0.5 * right, weights

    estimates = []
    for level in range(levels + 1):
        h = 2.0**-level
        d1, c1, w1 = axis(level, tmax1)
        d2, c2, w2 = axis(level, tmax2)
        values = f(d1[:, None], c1[:, None], d2[None, :], c2[None, :])
        estimate = 0.25 * h * h * complex(np.sum(w1[:, None] * w2[None, :] * values))
        estimates.append(estimate)
        if len(estimates) >= 2:
            error = abs(estimates[-1] - estimates[-2])
            logger.debug("square quadrature level %d: %r (change %.3e)", level, estimate, error)
            if level >= 3 and error <= tol.target(estimate):
                return estimate
    return _finish(estimates, tol, "square tanh-sinh quadrature")


@dataclass(frozen=True)
class TorusPoint:
    """A point y of the complex torus C/(Z*tau + Z)."""

    y: complex
    tau: complex

    def __post_init__(self):
        if complex(self.tau).imag <= 0:
            raise DomainError(f"tau must lie in the upper half plane, got {self.tau}")
        object.__setattr__(self, "y", complex(self.y))
        object.__setattr__(self, "tau", complex(self.tau))

    @property
    def coords(self) -> Tuple[float, float]:
        """Real lattice coordinates (p, q) with y = p*tau + q."""
        return lattice_coords(self.y, self.tau)


def lattice_coords(y: complex, tau: complex) -> Tuple[float, float]:
    """Write y = p*tau + q with real p, q."""
    p = y.imag / tau.imag
    q = y.real - p * tau.real
    return p, q


def _wrap(c: float) -> float:
    c -= math.floor(c)
    return 0.0 if c >= 1.0 else c


def torus_reduce(point: TorusPoint) -> TorusPoint:
    """Return the representative of `point` with lattice coordinates in [0, 1)**2."""
    p, q = point.coords
    if 0.0 <= p < 1.0 and 0.0 <= q < 1.0:
        return point
    p, q = _wrap(p), _wrap(q)
    tau = point.tau
    for _ in range(4):
        candidate = TorusPoint(complex(q + p * tau.real, p * tau.imag), tau)
        cp, cq = candidate.coords
        if 0.0 <= cp < 1.0 and 0.0 <= cq < 1.0:
            return candidate
        # Rounding pushed a coordinate just outside the unit square; snap it onto the edge.
        p = 0.0 if not 0.0 <= cp < 1.0 else p
        q = 0.0 if not 0.0 <= cq < 1.0 else q
    return candidate


def torus_distance(p: TorusPoint, q: TorusPoint) -> float:
    """Max-norm distance of the lattice coordinates of p - q to the nearest lattice point."""
    if abs(p.tau - q.tau) > 1e-9 * max(1.0, abs(p.tau)):
        raise DomainError(f"Torus points on different lattices: {p.tau} vs {q.tau}")
    dp, dq = lattice_coords(p.y - q.y, p.tau)
    return max(abs(dp - round(dp)), abs(dq - round(dq)))


def torus_eq(p: TorusPoint, q: TorusPoint, tol: Optional[Tolerance] = None) -> bool:
    """Whether p and q agree on the torus within abs_eps in lattice coordinates."""
    tol = tol or DEFAULT_TOLERANCE
    return torus_distance(p, q) < tol.abs_eps


def fourth_root(x: complex) -> complex:
    """Principal fourth root."""
    return cmath.exp(0.25 * cmath.log(x)) if x != 0 else 0j
