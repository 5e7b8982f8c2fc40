# Copyright 2023 Canonical
# See LICENSE file for licensing details.

"""Verification suites: each identity of the library evaluated at sample points.

Every suite returns CheckResult records; a check passes when its value is below the threshold,
or above it for lower-bound checks, or is True for exact checks.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Union

import numpy as np

from curve import (
    LOCAL_ORDERS,
    CurvePoint,
    abel_jacobi,
    branch_equation_residual,
    cubic_residuals,
    diagram_check,
    dual_basis,
    fn_fminus,
    fn_fplus,
    fn_hpm,
    fn_s,
    iota_pt,
    local_order,
    path_integral,
    phi2_vanishing_check,
    sigma_pt,
    theta_exprs_check,
    v_pm,
)
from hypergeo import FIXED_PARAMS, DomainPoint, euler_d1, f2_pde_residual, gauss_f
from monodromy import (
    GENERATORS,
    IDENTITY,
    LETTERS,
    MINUS_IDENTITY,
    bfs_closure,
    decompose,
    evaluate,
    igusa_index,
    is_in_M,
    principal_index_in_igusa,
)
from numerics import DEFAULT_TOLERANCE, Tolerance, TorusPoint, beta_fn, gamma_fn, torus_distance
from periods import (
    PathSegment,
    lattice_index_chain,
    reduced_solutions,
    segment_homology,
    tau_from_periods,
)
from schwarz import (
    SchwarzImage,
    forward,
    image_residual,
    inverse,
    modified_solution_vector,
    z_of_tau,
)
from theta import (
    IDENTITIES,
    TH00,
    THETA_CHARS,
    basic_identity_residual,
    jacobi_residual,
    modular_residual,
    theta_const,
    theta11_ratio_derivative_check,
)

logger = logging.getLogger(__name__)

SEED = 20230401
TAU_SAMPLES = (1j, 0.5 + 1j, 2j, 0.3 + 0.7j, -0.4 + 1.5j)
Z_SAMPLES = (0.1, 0.3, 0.5, 0.7, 0.9)
CURVE_Z_SAMPLES = (0.3, 0.5, 0.7)
CURVE_POINTS_PER_Z = 20
DIHEDRAL = "sigma**4 = iota**2 = 1, iota sigma = sigma**3 iota"
IMAGE_EQUATION = "theta00(y1) theta11(y2) = i theta11(y1) theta00(y2)"
CHAMBER_SAMPLES = ((0.2, 0.2), (0.2, 0.3), (0.05, 0.85), (0.45, 0.15), (0.7, 0.1))


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    identity: str
    value: Union[float, bool]
    threshold: Optional[float]
    passed: bool

    def as_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "identity": self.identity,
            "value": self.value,
            "threshold": self.threshold,
            "pass": self.passed,
        }


def below(check_id: str, identity: str, value: float, threshold: float) -> CheckResult:
    value = float(value)
    return CheckResult(check_id, identity, value, threshold, bool(value < threshold))


def above(check_id: str, identity: str, value: float, threshold: float) -> CheckResult:
    value = float(value)
    return CheckResult(check_id, identity, value, threshold, bool(value > threshold))


def exact(check_id: str, identity: str, holds: bool) -> CheckResult:
    return CheckResult(check_id, identity, bool(holds), None, bool(holds))


def theta_suite(tol: Optional[Tolerance] = None) -> List[CheckResult]:
    tol = tol or DEFAULT_TOLERANCE
    rng = np.random.default_rng(SEED)
    results = [
        below(
            "jacobi_identity",
            "theta01**4 + theta10**4 = theta00**4",
            max(jacobi_residual(tau, tol) for tau in TAU_SAMPLES),
            1e-12,
        )
    ]
    worst = 0.0
    for _ in range(100):
        identity = IDENTITIES[rng.integers(len(IDENTITIES))]
        c = THETA_CHARS[rng.integers(len(THETA_CHARS))]
        y = cmath.rect(rng.uniform(0, 2), rng.uniform(-math.pi, math.pi))
        tau = complex(rng.uniform(-1, 1), rng.uniform(0.5, 3))
        p, q = (int(v) for v in rng.integers(-3, 4, size=2))
        worst = max(worst, basic_identity_residual(identity, c, y, tau, p, q, tol))
    results.append(
        below("basic_theta_laws", "lattice and half-period shifts of theta", worst, 1e-10)
    )
    worst = 0.0
    for tau in TAU_SAMPLES:
        for c in (THETA_CHARS[0], THETA_CHARS[3]):
            for kind in ("shift2", "inversion"):
                worst = max(worst, modular_residual(kind, c, 0.3 - 0.1j, tau, tol))
    results.append(below("modular_laws", "tau -> tau + 2 and tau -> -1/tau", worst, 1e-10))
    worst = max(max(theta11_ratio_derivative_check(tau, tol=tol)) for tau in TAU_SAMPLES)
    results.append(
        below("ratio_derivative", "d/dy theta11/theta00 = 0 at 1/2 and tau/2", worst, 1e-7)
    )
    expected = math.pi**0.25 / gamma_fn(0.75).real
    results.append(
        below(
            "theta00_at_i",
            "theta00(0, i) = pi**(1/4)/Gamma(3/4)",
            abs(theta_const(TH00, 1j, tol) - expected),
            1e-10,
        )
    )
    return results


def periods_suite(tol: Optional[Tolerance] = None) -> List[CheckResult]:
    tol = tol or DEFAULT_TOLERANCE
    results = []
    agreement, real_part, min_imag = 0.0, 0.0, math.inf
    for z in Z_SAMPLES:
        first, second = tau_from_periods(z, tol)
        agreement = max(agreement, abs(first - second))
        real_part = max(real_part, abs(first.real))
        min_imag = min(min_imag, first.imag)
    results.append(below("tau_agreement", "tau from eta1 = tau from eta2", agreement, 1e-9))
    results.append(below("tau_pure_imaginary", "Re tau = 0 for z in (0, 1)", real_part, 1e-9))
    results.append(above("tau_upper_half", "Im tau > 0", min_imag, 0.0))
    results.append(
        below(
            "beta_quarter_half",
            "B(1/4, 1/2) = B(1/4, 1/4)/sqrt(2)",
            abs(beta_fn(0.25, 0.5) - beta_fn(0.25, 0.25) / math.sqrt(2)),
            1e-12,
        )
    )
    x = DomainPoint(0.2, 0.3)
    worst = max(
        abs(r.integral - r.closed_form) / abs(r.closed_form) for r in reduced_solutions(x, tol)
    )
    results.append(below("reduced_solutions", "f1..f4 match their closed forms", worst, 1e-8))
    results.append(
        exact(
            "lattice_index_chain",
            "[H1^- : Lambda] = [Lambda : (1 - sigma**2) H1] = 2",
            lattice_index_chain() == (2, 2),
        )
    )
    total = segment_homology(PathSegment.I01)
    for seg in (PathSegment.I1_1z, PathSegment.I1z_inf, PathSegment.Iminf_0):
        total = total + segment_homology(seg)
    results.append(
        exact(
            "segment_homology_sum",
            "the four segment classes sum to zero",
            all(c == 0 for c in total.coords),
        )
    )
    worst = 0.0
    for z in CURVE_Z_SAMPLES:
        base = path_integral(1, PathSegment.I01, z, 0, tol)
        worst = max(worst, abs(path_integral(1, PathSegment.I01, z, 1, tol) + 1j * base))
    results.append(below("sigma_eigenvalue_eta1", "sigma pulls eta1 back to -i eta1", worst, 1e-9))
    results.append(
        below(
            "f2_pde",
            "appell_f2 solves the F2 system",
            max(f2_pde_residual(FIXED_PARAMS, 0.1, 0.1, 1e-4, tol)),
            1e-6,
        )
    )
    z = DomainPoint(0.1, 0.1).z
    closed = beta_fn(0.25, 0.25) ** 2 * 0.81**-0.25 * gauss_f(0.25, 0.25, 0.5, 1 - z, tol)
    results.append(
        below(
            "euler_d1",
            "Euler integral over the unit square = B(1/4,1/4)**2 k F(1/4,1/4,1/2;1-z)",
            abs(euler_d1(0.1, 0.1) - closed) / abs(closed),
            1e-6,
        )
    )
    return results


def curve_samples(z: float, count: int = CURVE_POINTS_PER_Z) -> List[CurvePoint]:
    """Points on branch 0 over the real paths: three fifths in (0, 1), the rest in (1, 1/z)."""
    n_inner = 3 * count // 5
    inner = np.linspace(0.08, 0.92, n_inner)
    outer = 1 + np.linspace(0.15, 0.85, count - n_inner) * (1 / z - 1)
    return [CurvePoint(float(v), 0, z) for v in np.concatenate([inner, outer])]


def _point_distance(p: CurvePoint, q: CurvePoint) -> float:
    return abs(p.v - q.v) + abs(p.w - q.w) + (p.branch != q.branch)


def curve_suite(tol: Optional[Tolerance] = None) -> List[CheckResult]:
    tol = tol or DEFAULT_TOLERANCE
    rng = np.random.default_rng(SEED)
    identities, dihedral, algebra, anchors, half = 0.0, 0.0, 0.0, 0.0, 0.0
    phi2, phi1, branch = 0.0, math.inf, 0.0
    for z in CURVE_Z_SAMPLES:
        dual = dual_basis(z, tol)
        for p in curve_samples(z):
            identities = max(identities, max(theta_exprs_check(p, tol, dual).values()))
        for _ in range(50):
            p = CurvePoint(rng.uniform(0.02, 0.98), int(rng.integers(4)), z)
            four = sigma_pt(sigma_pt(sigma_pt(sigma_pt(p))))
            dihedral = max(
                dihedral,
                _point_distance(four, p),
                _point_distance(iota_pt(iota_pt(p)), p),
                _point_distance(iota_pt(sigma_pt(p)), sigma_pt(sigma_pt(sigma_pt(iota_pt(p))))),
            )
            s = fn_s(p)
            algebra = max(
                algebra,
                abs(fn_s(iota_pt(p)) - s) / max(1.0, abs(s)),
                abs(fn_fplus(p) ** 2 + z * fn_hpm(1, s, z)) / max(1.0, abs(s)),
                abs(fn_fminus(p) ** 2 + z * fn_hpm(-1, s, z)) / max(1.0, abs(s)),
                diagram_check(p),
                *cubic_residuals(p),
            )
        tau = dual.tau
        expected = {
            "P0": (0, 0),
            "P1": (0, 0),
            "P1z": ((tau + 1) / 2, (tau + 1) / 2),
            "Pinf": ((tau + 1) / 2, (tau - 1) / 2),
        }
        for name, (e1, e2) in expected.items():
            y1, y2 = abel_jacobi(CurvePoint.at_ramification(name, z), tol, dual)
            anchors = max(
                anchors,
                torus_distance(y1, TorusPoint(e1, tau)),
                torus_distance(y2, TorusPoint(e2, tau)),
            )
        _, v_minus = v_pm(z)
        y1, _ = abel_jacobi(CurvePoint(v_minus.real, 0, z), tol, dual)
        half = max(half, torus_distance(y1, TorusPoint(0.5, tau)))
        vanishing, other = phi2_vanishing_check(z, tol)
        phi2, phi1 = max(phi2, vanishing), min(phi1, other)
        branch = max(branch, branch_equation_residual(z, tau, tol))
    orders = all(
        local_order(function, point, 0.5) == order
        for function, table in LOCAL_ORDERS.items()
        for point, order in table.items()
    )
    return [
        below("theta_expressions", "s, f**2, 1 - v, w/v as theta quotients", identities, 1e-8),
        below("dihedral_relations", DIHEDRAL, dihedral, 1e-10),
        below("function_algebra", "iota fixes s, f**2 = -z h, E1, E2, diagram", algebra, 1e-10),
        below("abel_jacobi_anchors", "images of P0, P1, P1/z, Pinf", anchors, 1e-8),
        below("y1_at_v_minus", "y1(P_v-) = 1/2", half, 1e-8),
        below("phi2_vanishes", "phi2 vanishes at P_v-", phi2, 1e-8),
        above("phi1_nonzero", "phi1 does not vanish at P_v-", phi1, 1e-2),
        below("branch_equation", "l**2 + (2 - 4/z) l + 1 = 0", branch, 1e-10),
        exact("local_orders", "zero and pole orders of w, v, w/v, h+ and h-", orders),
    ]


def schwarz_suite(tol: Optional[Tolerance] = None) -> List[CheckResult]:
    tol = tol or DEFAULT_TOLERANCE
    round_trip, z_gap, residual, real_part, aj_gap, ratios = 0.0, 0.0, 0.0, 0.0, 0.0, 0.0
    for x1, x2 in CHAMBER_SAMPLES:
        x = DomainPoint(x1, x2)
        image = forward(x, tol)
        back = inverse(image, tol)
        round_trip = max(round_trip, abs(back.x1 - x.x1), abs(back.x2 - x.x2))
        z_gap = max(z_gap, abs(z_of_tau(image.tau, tol) - x.z))
        residual = max(residual, image_residual(image, tol))
        real_part = max(real_part, abs(image.tau.real))
        y1, y2 = abel_jacobi(CurvePoint(1 - x1, 0, x.z.real), tol)
        aj_gap = max(
            aj_gap,
            torus_distance(y1, TorusPoint(image.y1, y1.tau)),
            torus_distance(y2, TorusPoint(image.y2, y2.tau)),
        )
        f = modified_solution_vector(x, tol)
        ratios = max(
            ratios,
            abs(f[0] / f[1] - image.tau),
            abs(f[2] / f[1] - image.y1),
            abs(f[3] / f[1] - image.y2),
        )
    image = forward(DomainPoint(0.2, 0.3), tol)
    perturbed = image_residual(SchwarzImage(image.y1 + 0.01, image.y2, image.tau), tol)
    return [
        below("round_trip", "inverse(forward(x)) = x", round_trip, 1e-8),
        below("z_of_tau", "z(tau(x)) = (1 - x1 - x2)/((1 - x1)(1 - x2))", z_gap, 1e-9),
        below("z_of_tau_at_i", "z(i) = 1", abs(z_of_tau(1j, tol) - 1), 1e-10),
        below("image_equation", IMAGE_EQUATION, residual, 1e-9),
        above("image_equation_perturbed", f"y1 + 0.01 violates {IMAGE_EQUATION}", perturbed, 1e-3),
        below("tau_pure_imaginary", "Re tau = 0 on the real chamber", real_part, 1e-9),
        below("forward_matches_abel_jacobi", "(y1, y2) = AJ image of P_(1-x1)", aj_gap, 1e-8),
        below("modified_vector", "Q f reproduces (tau, y1, y2)", ratios, 1e-10),
    ]


def _random_word(rng: np.random.Generator, max_length: int) -> List[str]:
    names = sorted(name for name in LETTERS if name != "-E4")
    length = int(rng.integers(0, max_length + 1))
    return [names[i] for i in rng.integers(len(names), size=length)]


def monodromy_suite(
    tol: Optional[Tolerance] = None, closure_length: int = 4
) -> List[CheckResult]:
    rng = np.random.default_rng(SEED)
    m = GENERATORS
    closure = bfs_closure(closure_length)
    words = [_random_word(rng, 20) for _ in range(20)]
    h2 = MINUS_IDENTITY @ evaluate(["M3", "M5", "M3", "M5", "M1", "M2"])
    involutions = m["M1"] @ m["M1"] == IDENTITY and m["M2"] @ m["M2"] == IDENTITY
    round_trips = all(evaluate(decompose(evaluate(w))) == evaluate(w) for w in words)
    h2_ok = (
        h2.real[2:, :2].tolist() == [[0, -1], [-1, 0]]
        and not is_in_M(h2).member
        and evaluate(decompose(h2, extended=True)) == h2
    )
    return [
        exact("involutions", "M1**2 = M2**2 = E4", involutions),
        exact("commuting", "M1 M2 = M2 M1", m["M1"] @ m["M2"] == m["M2"] @ m["M1"]),
        exact(
            "generators_are_members",
            "M1..M5 pass the membership test",
            all(is_in_M(g).member for g in m.values()),
        ),
        exact("minus_identity_rejected", "-E4 is not a member", not is_in_M(MINUS_IDENTITY)),
        exact("igusa_index=3", "[SL2(Z) : Igusa group] = 3", igusa_index() == 3),
        exact("principal_index=2", "[Igusa : Gamma(2)] = 2", principal_index_in_igusa() == 2),
        exact(
            f"closure_{closure_length}_members",
            "every short product is a member",
            all(is_in_M(g).member for g in closure),
        ),
        exact("decompose_round_trip", "decomposed words evaluate back", round_trips),
        exact("h2_block", "-(M3 M5)**2 M1 M2 has L = [[0, -1], [-1, 0]], only -E4 x M", h2_ok),
    ]


SUITES: Dict[str, Callable[..., List[CheckResult]]] = {
    "theta": theta_suite,
    "periods": periods_suite,
    "curve": curve_suite,
    "schwarz": schwarz_suite,
    "monodromy": monodromy_suite,
}


def run_suites(names: Iterable[str], tol: Optional[Tolerance] = None) -> List[CheckResult]:
    """Run the named suites ("all" expands to every suite) in a fixed order."""
    names = list(names)
    if "all" in names:
        names = list(SUITES)
    results = []
    for name in names:
        suite_results = SUITES[name](tol)
        failed = [r.check_id for r in suite_results if not r.passed]
        if failed:
            logger.warning("suite %s: failed checks %s", name, failed)
        logger.info("suite %s: %d checks, %d failed", name, len(suite_results), len(failed))
        results.extend(suite_results)
    return results
