# Copyright 2023 Canonical
# See LICENSE file for licensing details.

"""Period integrals of the curve C_z: w**4 = v**3 (1 - v)(1 - v z).

The holomorphic eigenforms are eta1 = dv/w, eta2 = v**2 dv/w**3 and eta3 = v dv/w**2. Along the
four real segments joining the ramification points their integrands take boundary values from
the upper half v-plane, continued from the segment (0, 1) where every factor is positive. The
arguments of (v, 1 - v, 1 - v z) are then constant on each segment:

    (-oo, 0): (pi, 0, 0)   (0, 1): (0, 0, 0)   (1, 1/z): (0, -pi, 0)   (1/z, oo): (0, -pi, -pi)

so every segment integral is a fixed unit phase times a positive integral. Homology is tracked
in the coordinates of the basis (alpha1, alpha2, beta1, beta2) of the lattice Lambda.
"""

import logging
from concurrent.futures import Executor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from errors import DomainError
from hypergeo import DomainPoint, appell_f1, gauss_f
from numerics import (
    DEFAULT_TOLERANCE,
    Tolerance,
    beta_fn,
    e_phase,
    gamma_fn,
    integrate_de,
)

logger = logging.getLogger(__name__)


class PathSegment(str, Enum):
    """Real segments between consecutive ramification points of C_z."""

    I01 = "I01"
    I1_1z = "I1_1z"
    I1z_inf = "I1z_inf"
    Iminf_0 = "Iminf_0"


# Exponents (e_v, e_1, e_z) with eta_j = v**(-e_v) (1 - v)**(-e_1) (1 - v z)**(-e_z) dv.
ETA_EXPONENTS: Dict[int, Tuple[Fraction, Fraction, Fraction]] = {
    1: (Fraction(3, 4), Fraction(1, 4), Fraction(1, 4)),
    2: (Fraction(1, 4), Fraction(3, 4), Fraction(3, 4)),
    3: (Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)),
}

# Arguments of (v, 1 - v, 1 - v z) on each segment, in units of pi.
SEGMENT_ARGUMENTS: Dict[PathSegment, Tuple[int, int, int]] = {
    PathSegment.Iminf_0: (1, 0, 0),
    PathSegment.I01: (0, 0, 0),
    PathSegment.I1_1z: (0, -1, 0),
    PathSegment.I1z_inf: (0, -1, -1),
}

# Pullback eigenvalues of sigma: (v, w) -> (v, i w).
SIGMA_EIGENVALUES = {1: -1j, 2: 1j, 3: -1 + 0j}


def segment_phase(j: int, seg: PathSegment) -> complex:
    """Constant phase of the eta_j integrand on a segment."""
    arguments = SEGMENT_ARGUMENTS[PathSegment(seg)]
    exponent = sum(e * a for e, a in zip(ETA_EXPONENTS[j], arguments))
    # exp(-i pi x) = e(-x/2)
    return e_phase(-Fraction(exponent) / 2)


def _is_real_unit_interval(z: complex) -> bool:
    return z.imag == 0 and 0 <= z.real < 1


def segment_factors(
    seg: PathSegment, z: complex
) -> Tuple[Callable, Callable[[Tuple], Tuple[float, float]]]:
    """Parametrize a segment over s in (0, 1).

    Returns a function mapping (s, s, 1 - s) to (v, 1 - v, 1 - v z, dv/ds) as complex arrays,
    formed without cancellation near the endpoints, and a function giving the singular
    exponents at s = 0 and s = 1 for given (e_v, e_1, e_z).
    """
    seg = PathSegment(seg)
    if seg is PathSegment.I01:

        def factors(s, d0, d1):
            return s + 0j, d1 + 0j, 1 - s * z, np.ones_like(s) + 0j

        def exponents(e):
            return -e[0], -e[1]

    elif seg is PathSegment.I1_1z:
        if z == 0:
            raise DomainError("segment (1, 1/z) is undefined at z = 0")
        width = (1 - z) / z

        def factors(s, d0, d1):
            return 1 + width * d0, -width * d0, (1 - z) * d1, width * np.ones_like(s)

        def exponents(e):
            return -e[1], -e[2]

    elif seg is PathSegment.I1z_inf:
        if z == 0:
            raise DomainError("segment (1/z, oo) is undefined at z = 0")

        def factors(s, d0, d1):
            return 1 / (z * d0), -(1 - z * d0) / (z * d0), -d1 / d0 + 0j, 1 / (z * d0**2)

        def exponents(e):
            return float(sum(e)) - 2, -e[2]

    else:

        def factors(s, d0, d1):
            return -d0 / d1 + 0j, 1 / d1 + 0j, (d1 + z * d0) / d1, 1 / d1**2 + 0j

        def exponents(e):
            return -e[0], float(sum(e)) - 2

    return factors, lambda e: tuple(float(x) for x in exponents(e))


def eta_segment(j: int, seg: PathSegment, z, tol: Optional[Tolerance] = None) -> complex:
    """Integral of eta_j along a full segment.

    For real z in [0, 1) the integrand is the segment phase times a positive function. Other z
    use principal powers along the same straight parametrization, and carry no validated
    homology meaning.
    """
    tol = tol or DEFAULT_TOLERANCE
    z = complex(z)
    if z == 1:
        raise DomainError("the curve degenerates at z = 1")
    e_v, e_1, e_z = (float(e) for e in ETA_EXPONENTS[j])
    factors, exponents = segment_factors(seg, z)
    real_case = _is_real_unit_interval(z)
    if not real_case:
        logger.warning("eta_segment at z = %s uses principal branches only", z)

    def integrand(s, d0, d1):
        v, one_minus_v, one_minus_vz, jacobian = factors(s, d0, d1)
        if real_case:
            return (
                np.abs(v) ** -e_v
                * np.abs(one_minus_v) ** -e_1
                * np.abs(one_minus_vz) ** -e_z
                * np.abs(jacobian)
            )
        return v**-e_v * one_minus_v**-e_1 * one_minus_vz**-e_z * jacobian

    value = integrate_de(integrand, 0.0, 1.0, exponents(ETA_EXPONENTS[j]), tol)
    if real_case:
        value *= segment_phase(j, seg)
    return value


def beta_period(j: int, i: int, z, tol: Optional[Tolerance] = None) -> complex:
    """Integral of eta_j over beta_i, where beta1 = (1 - sigma**2) I01 and beta2 = sigma(beta1)."""
    if j not in (1, 2) or i not in (1, 2):
        raise DomainError(f"beta_period is defined for j, i in {{1, 2}}, got ({j}, {i})")
    value = 2 * eta_segment(j, PathSegment.I01, z, tol)
    return value if i == 1 else SIGMA_EIGENVALUES[j] * value


def alpha_period(j: int, i: int, z, tol: Optional[Tolerance] = None) -> complex:
    """Integral of eta_j over alpha_i.

    alpha1 = (1 - sigma**2)(1 - sigma)(I01 + I1_1z) - beta1 and alpha2 = sigma(alpha1).
    """
    if j not in (1, 2) or i not in (1, 2):
        raise DomainError(f"alpha_period is defined for j, i in {{1, 2}}, got ({j}, {i})")
    eigenvalue = SIGMA_EIGENVALUES[j]
    s01 = eta_segment(j, PathSegment.I01, z, tol)
    s1z = eta_segment(j, PathSegment.I1_1z, z, tol)
    value = 2 * (1 - eigenvalue) * (s01 + s1z) - 2 * s01
    return value if i == 1 else eigenvalue * value


def tau_from_periods(z, tol: Optional[Tolerance] = None) -> Tuple[complex, complex]:
    """The period ratio from (alpha1, beta1, eta1) and from (alpha2, beta2, eta2)."""
    first = alpha_period(1, 1, z, tol) / beta_period(1, 1, z, tol)
    second = alpha_period(2, 2, z, tol) / beta_period(2, 2, z, tol)
    return first, second


@dataclass(frozen=True)
class PeriodVector:
    """Values of the four solutions f1..f4 at a point x."""

    f1: complex
    f2: complex
    f3: complex
    f4: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.f1, self.f2, self.f3, self.f4], dtype=complex)


def _integral_d(z: complex, tol: Tolerance) -> complex:
    """Integral over (-oo, 0) of |v|**(-3/4) (1 - v)**(-1/4) (1 - v z)**(-1/4) dv."""

    def integrand(s, d0, d1):
        return (d0 * d1) ** -0.75 * (1 - (1 - z) * s) ** -0.25

    return integrate_de(integrand, 0.0, 1.0, (-0.75, -0.75), tol)


def _integral_c(z: complex, tol: Tolerance) -> complex:
    """Integral over (1/z, oo), mapped to (0, 1) by v = 1/(z u)."""

    def integrand(u, d0, d1):
        return d0**-0.75 * d1**-0.25 * (1 - z * u) ** -0.25

    return integrate_de(integrand, 0.0, 1.0, (-0.75, -0.25), tol)


def _integral_partial(s0: complex, z: complex, tol: Tolerance) -> complex:
    """Integral over (0, s0) of eta1's integrand along v = s0 u."""

    def integrand(u, d0, d1):
        return d0**-0.75 * ((1 - s0) + s0 * d1) ** -0.25 * (1 - s0 * z * u) ** -0.25

    return s0**0.25 * integrate_de(integrand, 0.0, 1.0, (-0.75, 0.0), tol)


def periods(
    x: DomainPoint, tol: Optional[Tolerance] = None, executor: Optional[Executor] = None
) -> PeriodVector:
    """The four solutions of the fixed-parameter F2 system at x, as period integrals.

    f1 = B(1/4,1/4) k D,  f2 = i B(1/4,1/2) k C,  f3 = e(3/8) B(1/4,1/4) k F(1 - x1),
    f4 = e(3/8) B(1/4,1/4) k F(1 - x2), with k = (1 - x1)**(-1/4) (1 - x2)**(-1/4).
    """
    tol = tol or DEFAULT_TOLERANCE
    if not x.real_chamber:
        logger.warning("periods at %s: outside the real chamber, principal branches used", x)
    z = x.z
    jobs = (
        (_integral_d, (z, tol)),
        (_integral_c, (z, tol)),
        (_integral_partial, (1 - x.x1, z, tol)),
        (_integral_partial, (1 - x.x2, z, tol)),
    )
    if executor is None:
        d, c, f_1, f_2 = (job(*args) for job, args in jobs)
    else:
        futures = [executor.submit(job, *args) for job, args in jobs]
        d, c, f_1, f_2 = (future.result() for future in futures)
    k = (1 - x.x1) ** -0.25 * (1 - x.x2) ** -0.25
    b_quarter = beta_fn(0.25, 0.25)
    b_half = beta_fn(0.25, 0.5)
    phase = e_phase(Fraction(3, 8))
    result = PeriodVector(
        f1=b_quarter * k * d,
        f2=1j * b_half * k * c,
        f3=phase * b_quarter * k * f_1,
        f4=phase * b_quarter * k * f_2,
    )
    logger.debug("periods at %s: %s", x, result)
    return result


@dataclass(frozen=True)
class ReducedSolution:
    """One solution computed as a one-dimensional integral and in closed form."""

    name: str
    integral: complex
    closed_form: complex


def reduced_solutions(x: DomainPoint, tol: Optional[Tolerance] = None) -> List[ReducedSolution]:
    """Each of f1..f4 alongside its closed form through F and F1."""
    tol = tol or DEFAULT_TOLERANCE
    f = periods(x, tol)
    z = x.z
    x1, x2 = x.x1, x.x2
    k = (1 - x1) ** -0.25 * (1 - x2) ** -0.25
    b_quarter = beta_fn(0.25, 0.25)
    phase = e_phase(Fraction(3, 8))
    quarter = Fraction(1, 4)

    def third(s1, s2):
        series = appell_f1(
            quarter, quarter, quarter, Fraction(5, 4), 1 - s1, (1 - s1 - s2) / (1 - s2), tol
        )
        return phase * 4 * b_quarter * (1 - s2) ** -0.25 * series

    return [
        ReducedSolution("D1", f.f1, b_quarter**2 * k * gauss_f(0.25, 0.25, 0.5, 1 - z, tol)),
        ReducedSolution(
            "D2",
            f.f2,
            1j * gamma_fn(0.25) ** 2 * gamma_fn(0.5) * k * gauss_f(0.25, 0.25, 1, z, tol),
        ),
        ReducedSolution("D3", f.f3, third(x1, x2)),
        ReducedSolution("D4", f.f4, third(x2, x1)),
    ]


class LambdaClass(str, Enum):
    """Finest of the nested lattices (1 - sigma**2) H1 < Lambda < H1^(-sigma**2) containing v."""

    in_sublattice_1ms2 = "in_sublattice_1ms2"
    in_Lambda = "in_Lambda"
    in_Hminus = "in_Hminus"
    outside = "outside"


@dataclass(frozen=True)
class LambdaVector:
    """Half-integer coordinates (p1, p2, q1, q2) over the basis (alpha1, alpha2, beta1, beta2)."""

    coords: Tuple[Fraction, Fraction, Fraction, Fraction]

    def __post_init__(self):
        coords = tuple(Fraction(c) for c in self.coords)
        if len(coords) != 4:
            raise DomainError(f"LambdaVector needs four coordinates, got {len(coords)}")
        object.__setattr__(self, "coords", coords)

    def __add__(self, other: "LambdaVector") -> "LambdaVector":
        return LambdaVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def scaled(self, factor) -> "LambdaVector":
        return LambdaVector(tuple(factor * c for c in self.coords))


ALPHA1 = LambdaVector((1, 0, 0, 0))
ALPHA2 = LambdaVector((0, 1, 0, 0))
BETA1 = LambdaVector((0, 0, 1, 0))
BETA2 = LambdaVector((0, 0, 0, 1))
BASIS = (ALPHA1, ALPHA2, BETA1, BETA2)


def lambda_classify(v: LambdaVector) -> LambdaClass:
    """Classify v in the chain (1 - sigma**2) H1 < Lambda < H1^(-sigma**2)."""
    doubled = [2 * c for c in v.coords]
    if any(d.denominator != 1 for d in doubled):
        return LambdaClass.outside
    parities = {int(d) % 2 for d in doubled}
    if len(parities) != 1:
        return LambdaClass.outside
    if parities == {1}:
        return LambdaClass.in_Hminus
    if sum(v.coords) % 2 == 0:
        return LambdaClass.in_sublattice_1ms2
    return LambdaClass.in_Lambda


def sigma_on_lambda(v: LambdaVector) -> LambdaVector:
    """sigma(alpha1) = alpha2, sigma(alpha2) = -alpha1, and likewise for beta."""
    p1, p2, q1, q2 = v.coords
    return LambdaVector((-p2, p1, -q2, q1))


# alpha_i . beta_j = -2 delta_ij
_INTERSECTION_GRAM = np.array(
    [[0, 0, -2, 0], [0, 0, 0, -2], [2, 0, 0, 0], [0, 2, 0, 0]], dtype=object
)


def intersection(u: LambdaVector, v: LambdaVector) -> int:
    """Intersection number of two cycles of Lambda given by integer coordinates."""
    for w in (u, v):
        if any(c.denominator != 1 for c in w.coords):
            raise DomainError(f"intersection needs integer coordinates, got {w.coords}")
    left = np.array(u.coords, dtype=object)
    right = np.array(v.coords, dtype=object)
    return int(left.dot(_INTERSECTION_GRAM).dot(right))


_SEGMENT_HOMOLOGY = {
    PathSegment.I01: (0, 0, 1, 0),
    PathSegment.I1_1z: (Fraction(1, 2), Fraction(1, 2), Fraction(-1, 2), Fraction(1, 2)),
    PathSegment.I1z_inf: (0, 0, 0, -1),
    PathSegment.Iminf_0: (Fraction(-1, 2), Fraction(-1, 2), Fraction(-1, 2), Fraction(1, 2)),
}


def segment_homology(seg: PathSegment) -> LambdaVector:
    """The class of (1 - sigma**2) applied to a segment, in Lambda coordinates."""
    return LambdaVector(_SEGMENT_HOMOLOGY[PathSegment(seg)])


def lattice_index_chain() -> Tuple[int, int]:
    """Indices [H1^(-sigma**2) : Lambda] and [Lambda : (1 - sigma**2) H1].

    All three lattices contain 2 Z**4, so counting members among the coordinate vectors with
    entries in {0, 1/2, 1, 3/2} gives the indices.
    """
    counts = {cls: 0 for cls in LambdaClass}
    for coords in product([Fraction(k, 2) for k in range(4)], repeat=4):
        counts[lambda_classify(LambdaVector(coords))] += 1
    sub = counts[LambdaClass.in_sublattice_1ms2]
    lam = sub + counts[LambdaClass.in_Lambda]
    hminus = lam + counts[LambdaClass.in_Hminus]
    return hminus // lam, lam // sub
