# Copyright 2023 Canonical
# See LICENSE file for licensing details.

"""Points, automorphisms and meromorphic functions of the curve C_z, and its Abel-Jacobi map.

A point is stored as (v, branch); w = i**branch * w0(v) where w0 is the boundary value from the
upper half v-plane of the fourth root of v**3 (1 - v)(1 - v z), positive on (0, 1). On the
ray (1/z, oo) this puts branch 0 at arg(w) = -pi/2, which is the principal root's branch 3.
"""

import cmath
import functools
import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from errors import BranchError, DomainError, PathError, PoleError
from numerics import DEFAULT_TOLERANCE, Tolerance, TorusPoint, integrate_de, torus_reduce
from periods import (
    ETA_EXPONENTS,
    SIGMA_EIGENVALUES,
    PathSegment,
    eta_segment,
    segment_factors,
    segment_phase,
)
from theta import TH00, TH01, TH10, TH11, theta, theta_const

logger = logging.getLogger(__name__)

RAMIFICATION_POINTS = ("P0", "P1", "P1z", "Pinf")
_IOTA_ON_RAMIFICATION = {"P0": "P1", "P1": "P0", "P1z": "Pinf", "Pinf": "P1z"}
_BRANCH_SEPARATION = 1e-6
_MAX_Z = 1 - 1e-6


def check_z(z) -> float:
    """Validate a modulus z in the open interval (0, 1)."""
    z = complex(z)
    if z.imag != 0 or not 0 < z.real < _MAX_Z:
        raise DomainError(f"z = {z} must lie in (0, {_MAX_Z})")
    return z.real


def _boundary_log(x):
    """Principal logarithm, except that negative reals get argument -pi."""
    x = np.asarray(x, dtype=complex)
    negative_real = (x.imag == 0) & (x.real < 0)
    return np.where(negative_real, np.log(np.abs(x)) - 1j * math.pi, np.log(x))


def w_values(v, one_minus_v, one_minus_vz, branch: int):
    """w on the given branch from accurately formed v, 1 - v and 1 - v z (arrays allowed)."""
    log_w = 0.25 * (3 * np.log(np.asarray(v, dtype=complex)) + _boundary_log(one_minus_v))
    log_w = log_w + 0.25 * _boundary_log(one_minus_vz)
    return 1j ** (branch % 4) * np.exp(log_w)


@dataclass(frozen=True)
class CurvePoint:
    """A point of C_z given by its v-coordinate and the branch index of w."""

    v: complex
    branch: int
    z: float
    ramification: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "branch", self.branch % 4)
        if self.ramification is not None:
            if self.ramification not in RAMIFICATION_POINTS:
                raise DomainError(f"unknown ramification point {self.ramification}")
            object.__setattr__(self, "branch", 0)
            return
        v = complex(self.v)
        object.__setattr__(self, "v", v)
        if v in (0, 1) or abs(v * self.z - 1) == 0:
            raise DomainError(f"v = {v} is a ramification point; use CurvePoint.at_ramification")

    @classmethod
    def at_ramification(cls, name: str, z: float) -> "CurvePoint":
        v = {"P0": 0j, "P1": 1 + 0j, "P1z": complex(1 / z), "Pinf": complex(math.inf)}[name]
        return cls(v, 0, z, name)

    @property
    def is_ramification(self) -> bool:
        return self.ramification is not None

    @property
    def w(self) -> complex:
        if self.ramification == "Pinf":
            return complex(math.inf)
        if self.is_ramification:
            return 0j
        return complex(w_values(self.v, 1 - self.v, 1 - self.v * self.z, self.branch))

    def curve_residual(self) -> float:
        """Relative residual of w**4 = v**3 (1 - v)(1 - v z)."""
        if self.is_ramification:
            return 0.0
        rhs = self.v**3 * (1 - self.v) * (1 - self.v * self.z)
        return abs(self.w**4 - rhs) / max(1.0, abs(rhs))


def sigma_pt(p: CurvePoint) -> CurvePoint:
    """sigma: (v, w) -> (v, i w)."""
    if p.is_ramification:
        return p
    return CurvePoint(p.v, p.branch + 1, p.z)


def iota_pt(p: CurvePoint) -> CurvePoint:
    """iota: (v, w) -> ((1 - v)/(1 - v z), v (1 - v) sqrt(1 - z) / ((1 - v z) w))."""
    z = check_z(p.z)
    if p.is_ramification:
        return CurvePoint.at_ramification(_IOTA_ON_RAMIFICATION[p.ramification], z)
    v = p.v
    target_v = (1 - v) / (1 - v * z)
    target_w = v * (1 - v) * math.sqrt(1 - z) / ((1 - v * z) * p.w)
    candidates = [CurvePoint(target_v, k, z) for k in range(4)]
    distances = sorted((abs(c.w - target_w), c.branch) for c in candidates)
    if distances[1][0] - distances[0][0] < _BRANCH_SEPARATION * abs(target_w):
        logger.error("iota at v = %s: branches %s are indistinguishable", v, distances[:2])
        raise BranchError(f"ambiguous branch for iota at v = {v}")
    return candidates[distances[0][1]]


def v_pm(z) -> Tuple[complex, complex]:
    """Roots v+ and v- of z v**2 - 2 v + 1 = 0, the v-coordinates of iota's fixed points."""
    z = complex(z)
    if z == 0:
        raise DomainError("v+ is undefined at z = 0")
    root = cmath.sqrt(1 - z)
    v_minus = 1 / (1 + root)
    v_plus = (1 + root) / z
    return v_plus, v_minus


def _regular(p: CurvePoint, what: str) -> None:
    if p.is_ramification:
        raise PoleError(f"{what} is not evaluated at the ramification point {p.ramification}")


def fn_s(p: CurvePoint) -> complex:
    """s = w**2 / (v (1 - v z))."""
    _regular(p, "s")
    return p.w**2 / (p.v * (1 - p.v * p.z))


def s_expressions(p: CurvePoint) -> Tuple[complex, complex, complex, complex]:
    """The four expressions for s: u/(v(1-vz)), v**2(1-v)/u, w**2/(v(1-vz)), v**2(1-v)/w**2."""
    _regular(p, "s")
    v, w, z = p.v, p.w, p.z
    u = w * w
    return (
        u / (v * (1 - v * z)),
        v**2 * (1 - v) / u,
        w**2 / (v * (1 - v * z)),
        v**2 * (1 - v) / w**2,
    )


def fn_fplus(p: CurvePoint) -> complex:
    """f+ = w/v + sqrt(1 - z) v/w."""
    _regular(p, "f+")
    return p.w / p.v + math.sqrt(1 - p.z) * p.v / p.w


def fn_fminus(p: CurvePoint) -> complex:
    """f- = w/v - sqrt(1 - z) v/w."""
    _regular(p, "f-")
    return p.w / p.v - math.sqrt(1 - p.z) * p.v / p.w


def fn_hpm(sign: int, s_val: complex, z) -> complex:
    """h+ = (s - v+)(s + v-)/s and h- = (s + v+)(s - v-)/s."""
    if s_val == 0:
        raise PoleError("h+- has a pole at s = 0")
    v_plus, v_minus = v_pm(z)
    if sign > 0:
        return (s_val - v_plus) * (s_val + v_minus) / s_val
    return (s_val + v_plus) * (s_val - v_minus) / s_val


@dataclass(frozen=True)
class DualBasisData:
    """beta-periods of eta1, eta2 and the period ratio tau, for one z."""

    z: float
    b1_eta1: complex
    b1_eta2: complex
    b2_eta1: complex
    b2_eta2: complex
    a1_eta1: complex
    a1_eta2: complex
    tau: complex

    def coefficients(self) -> Tuple[Tuple[complex, complex], Tuple[complex, complex]]:
        """c[j][m] with phi_j = c[j][0] eta1 + c[j][1] eta2 and beta_i(phi_j) = delta_ij."""
        return (
            (1 / (2 * self.b1_eta1), 1 / (2 * self.b1_eta2)),
            (1 / (2 * self.b2_eta1), 1 / (2 * self.b2_eta2)),
        )

    def phi_periods(self, cycle: str) -> Tuple[complex, complex]:
        """Integrals of (phi1, phi2) over alpha1, alpha2, beta1 or beta2."""
        eta = {
            "beta1": (self.b1_eta1, self.b1_eta2),
            "beta2": (self.b2_eta1, self.b2_eta2),
            "alpha1": (self.a1_eta1, self.a1_eta2),
            "alpha2": (SIGMA_EIGENVALUES[1] * self.a1_eta1, SIGMA_EIGENVALUES[2] * self.a1_eta2),
        }[cycle]
        c = self.coefficients()
        return tuple(c[j][0] * eta[0] + c[j][1] * eta[1] for j in range(2))

    def phi_at(self, p: CurvePoint) -> Tuple[complex, complex]:
        """dv-coefficients of phi1 and phi2 at a regular point."""
        _regular(p, "phi")
        eta1 = 1 / p.w
        eta2 = p.v**2 / p.w**3
        c = self.coefficients()
        return tuple(c[j][0] * eta1 + c[j][1] * eta2 for j in range(2))


DUAL_CACHE_SIZE = 32


def dual_basis(z, tol: Optional[Tolerance] = None) -> DualBasisData:
    """Periods defining the dual basis phi1, phi2 of the Prym differentials."""
    return _dual_basis(check_z(z), tol or DEFAULT_TOLERANCE)


@functools.lru_cache(maxsize=DUAL_CACHE_SIZE)
def _dual_basis(z: float, tol: Tolerance) -> DualBasisData:
    s01 = {j: eta_segment(j, PathSegment.I01, z, tol) for j in (1, 2)}
    s1z = {j: eta_segment(j, PathSegment.I1_1z, z, tol) for j in (1, 2)}
    b1 = {j: 2 * s01[j] for j in (1, 2)}
    a1 = {j: 2 * (1 - SIGMA_EIGENVALUES[j]) * (s01[j] + s1z[j]) - 2 * s01[j] for j in (1, 2)}
    data = DualBasisData(
        z=z,
        b1_eta1=b1[1],
        b1_eta2=b1[2],
        b2_eta1=SIGMA_EIGENVALUES[1] * b1[1],
        b2_eta2=SIGMA_EIGENVALUES[2] * b1[2],
        a1_eta1=a1[1],
        a1_eta2=a1[2],
        tau=a1[1] / b1[1],
    )
    logger.debug("dual basis at z = %s: tau = %s", z, data.tau)
    return data


def path_integral(
    j: int, seg: PathSegment, z, branch: int, tol: Optional[Tolerance] = None
) -> complex:
    """Integral of eta_j along a full segment lifted to the given sheet, from w-values."""
    tol = tol or DEFAULT_TOLERANCE
    z = check_z(z)
    factors, exponents = segment_factors(seg, z)

    def integrand(s, d0, d1):
        v, one_minus_v, one_minus_vz, jacobian = factors(s, d0, d1)
        w = w_values(v.real, one_minus_v.real, one_minus_vz.real, branch)
        form = {1: 1 / w, 2: v**2 / w**3, 3: v / w**2}[j]
        return form * jacobian

    return integrate_de(integrand, 0.0, 1.0, exponents(ETA_EXPONENTS[j]), tol)


def _partial_magnitude(j: int, start: float, end: float, z: float, tol: Tolerance) -> float:
    """Integral of |eta_j| from a ramification point `start` in {0, 1} to a regular `end`."""
    e_v, e_1, e_z = (float(e) for e in ETA_EXPONENTS[j])
    if start == 0.0:

        def integrand(t, da, db):
            return da**-e_v * ((1 - end) + db) ** -e_1 * (1 - t * z) ** -e_z

        return integrate_de(integrand, 0.0, end, (-e_v, 0.0), tol).real

    def integrand(t, da, db):
        return t**-e_v * da**-e_1 * np.abs(1 - t * z) ** -e_z

    return integrate_de(integrand, 1.0, end, (-e_1, 0.0), tol).real


def eta_from_base(p: CurvePoint, tol: Optional[Tolerance] = None) -> Tuple[complex, complex]:
    """Integrals of (eta1, eta2) from P0 to p along the canonical real path on p's sheet."""
    tol = tol or DEFAULT_TOLERANCE
    z = check_z(p.z)
    chains = {
        "P0": (),
        "P1": (PathSegment.I01,),
        "P1z": (PathSegment.I01, PathSegment.I1_1z),
        "Pinf": (PathSegment.I01, PathSegment.I1_1z, PathSegment.I1z_inf),
    }
    if p.is_ramification:
        chain = chains[p.ramification]
        return tuple(sum((eta_segment(j, seg, z, tol) for seg in chain), 0j) for j in (1, 2))
    v = p.v
    if v.imag != 0:
        raise PathError(f"no canonical path to the non-real point v = {v}")
    v = v.real
    if 0 < v < 1:
        values = [_partial_magnitude(j, 0.0, v, z, tol) + 0j for j in (1, 2)]
    elif 1 < v < 1 / z:
        values = [
            eta_segment(j, PathSegment.I01, z, tol)
            + segment_phase(j, PathSegment.I1_1z) * _partial_magnitude(j, 1.0, v, z, tol)
            for j in (1, 2)
        ]
    else:
        raise PathError(f"v = {v} is not on the segments (0, 1) or (1, 1/z)")
    return tuple(SIGMA_EIGENVALUES[j] ** p.branch * values[j - 1] for j in (1, 2))


def abel_jacobi_raw(
    p: CurvePoint, tol: Optional[Tolerance] = None, dual: Optional[DualBasisData] = None
) -> Tuple[complex, complex, complex]:
    """Unreduced (y1, y2) = (integral of 2 phi1, integral of 2 phi2) from P0, and tau."""
    dual = dual or dual_basis(p.z, tol)
    eta1, eta2 = eta_from_base(p, tol)
    c = dual.coefficients()
    y1 = 2 * (c[0][0] * eta1 + c[0][1] * eta2)
    y2 = 2 * (c[1][0] * eta1 + c[1][1] * eta2)
    return y1, y2, dual.tau


def abel_jacobi(
    p: CurvePoint, tol: Optional[Tolerance] = None, dual: Optional[DualBasisData] = None
) -> Tuple[TorusPoint, TorusPoint]:
    """The Abel-Jacobi Lambda-map of p, as a pair of reduced torus points."""
    y1, y2, tau = abel_jacobi_raw(p, tol, dual)
    return torus_reduce(TorusPoint(y1, tau)), torus_reduce(TorusPoint(y2, tau))


def phi2_vanishing_check(z, tol: Optional[Tolerance] = None) -> Tuple[float, float]:
    """(|phi2|, |phi1|) at P_{v-} on branch 0; the first vanishes, the second does not."""
    z = check_z(z)
    dual = dual_basis(z, tol)
    _, v_minus = v_pm(z)
    phi1, phi2 = dual.phi_at(CurvePoint(v_minus.real, 0, z))
    return abs(phi2), abs(phi1)


def _relative(value: complex, expected: complex) -> float:
    return abs(value - expected) / max(1.0, abs(expected))


@dataclass(frozen=True)
class ThetaConstants:
    t00: complex
    t01: complex
    t10: complex

    @classmethod
    def at(cls, tau: complex, tol: Optional[Tolerance] = None) -> "ThetaConstants":
        return cls(*(theta_const(c, tau, tol) for c in (TH00, TH01, TH10)))


def branch_equation_residual(z, tau: complex, tol: Optional[Tolerance] = None) -> float:
    """Both theta01**4/theta10**4 and its inverse solve l**2 + (2 - 4/z) l + 1 = 0."""
    k = ThetaConstants.at(tau, tol)
    residuals = []
    for lam in (k.t01**4 / k.t10**4, k.t10**4 / k.t01**4):
        residuals.append(abs(lam**2 + (2 - 4 / z) * lam + 1) / max(1.0, abs(lam) ** 2))
    return max(residuals)


def theta_exprs_check(
    p: CurvePoint, tol: Optional[Tolerance] = None, dual: Optional[DualBasisData] = None
) -> Dict[str, float]:
    """Residuals of the theta expressions for s, f+**2, f-**2, 1 - v, w/v and v(v-1)/(v-1/z)."""
    z = check_z(p.z)
    y1, y2, tau = abel_jacobi_raw(p, tol, dual)
    k = ThetaConstants.at(tau, tol)
    th = {
        (c, name): theta(c, y, tau, tol)
        for c in (TH00, TH01, TH10, TH11)
        for name, y in (("y1", y1), ("y2", y2), ("y1p", -y2))
    }

    def ratio11(name):
        return th[(TH11, name)] / th[(TH00, name)]

    def g(name):
        return (th[(TH01, name)] * th[(TH10, name)] / (th[(TH00, name)] * th[(TH11, name)])) ** 2

    def big_phi(name):
        return th[(TH01, name)] * th[(TH10, name)] / th[(TH00, name)] ** 2

    def phi_prime(name):
        return th[(TH01, name)] * th[(TH10, name)] / (th[(TH00, name)] * th[(TH11, name)])

    v = p.v
    s = fn_s(p)
    fplus, fminus = fn_fplus(p), fn_fminus(p)
    sqrt_z = math.sqrt(z)
    scale = k.t00**4 / (4 * k.t01**2 * k.t10**2)
    first_form = scale * (big_phi("y1") + big_phi("y2")) ** 2
    second_form = scale * (big_phi("y1") - 1j * ratio11("y1") * phi_prime("y1p")) ** 2
    lemma_rhs = v * (v - 1) / (v - 1 / z)
    return {
        "s_y1": _relative(ratio11("y1") ** 2 / sqrt_z, s),
        "s_y2": _relative(-(ratio11("y2") ** 2) / sqrt_z, s),
        "fplus_sq": _relative(-2 * g("y2"), fplus**2),
        "fminus_sq": _relative(2 * g("y1"), fminus**2),
        "one_minus_v": _relative(first_form, 1 - v),
        "one_minus_v_second": _relative(second_form, 1 - v),
        "w_over_v": _relative(-(phi_prime("y1") + 1j * phi_prime("y2")) / math.sqrt(2), p.w / v),
        "ratio4_y1": _relative(ratio11("y1") ** 4, lemma_rhs),
        "ratio4_y2": _relative(ratio11("y2") ** 4, lemma_rhs),
        "sqrt_z": _relative(2 * k.t01**2 * k.t10**2 / k.t00**4, sqrt_z),
    }


def diagram_check(p: CurvePoint) -> float:
    """Residual of pr1(sigma(P)) = psi(pr2(P)) with psi(f-, s) = (i f-, -s)."""
    check_z(p.z)
    q = sigma_pt(p)
    return max(abs(fn_fplus(q) - 1j * fn_fminus(p)), abs(fn_s(q) + fn_s(p)))


def cubic_residuals(p: CurvePoint) -> Tuple[float, float]:
    """Membership of (s f+, s) in E1 and of (s f-, s) in E2.

    E1: f'**2 = -z s (s - v+)(s + v-),  E2: f'**2 = -z s (s + v+)(s - v-).
    """
    z = check_z(p.z)
    v_plus, v_minus = v_pm(z)
    s = fn_s(p)
    e1_lhs = (s * fn_fplus(p)) ** 2
    e1_rhs = -z * s * (s - v_plus) * (s + v_minus)
    e2_lhs = (s * fn_fminus(p)) ** 2
    e2_rhs = -z * s * (s + v_plus) * (s - v_minus)
    return _relative(e1_lhs, e1_rhs), _relative(e2_lhs, e2_rhs)


# Orders in a local coordinate t of w, v, w/v and h+- at the ramification points (v - v0 ~ t**4).
# s has order 2 at P0, P1 and -2 at P1z, Pinf; h+- = s + c1 + c2/s has a double pole at each.
LOCAL_ORDERS = {
    "w": {"P0": 3, "P1": 1, "P1z": 1, "Pinf": -5},
    "v": {"P0": 4, "Pinf": -4},
    "w_over_v": {"P0": -1, "P1": 1, "P1z": 1, "Pinf": -1},
    "h_plus": {"P0": -2, "P1": -2, "P1z": -2, "Pinf": -2},
    "h_minus": {"P0": -2, "P1": -2, "P1z": -2, "Pinf": -2},
}

_LOCAL_FUNCTIONS = {
    "w": lambda q: q.w,
    "v": lambda q: q.v,
    "w_over_v": lambda q: q.w / q.v,
    "h_plus": lambda q: fn_hpm(1, fn_s(q), q.z),
    "h_minus": lambda q: fn_hpm(-1, fn_s(q), q.z),
}


def local_order(
    function: str, point: str, z, distances: Tuple[float, float] = (1e-2, 1e-3)
) -> int:
    """Order of w, v, w/v or h+- at a ramification point, from the slope between two samples."""
    z = check_z(z)
    if function not in LOCAL_ORDERS or point not in RAMIFICATION_POINTS:
        raise DomainError(f"no local order for {function!r} at {point!r}")

    def sample(t: float) -> float:
        if point == "P0":
            v = t**4
        elif point == "P1":
            v = 1 - t**4
        elif point == "P1z":
            v = 1 / z - t**4
        else:
            v = -(t**-4)
        return abs(_LOCAL_FUNCTIONS[function](CurvePoint(v, 0, z)))

    near, nearer = distances
    slope = math.log(sample(nearer) / sample(near)) / math.log(nearer / near)
    logger.debug("local order of %s at %s: slope %.4f", function, point, slope)
    return round(slope)
