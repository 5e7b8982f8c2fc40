import cmath
import math
import unittest
from unittest import mock

from hypothesis import given, settings
from hypothesis import strategies as st

import curve
from curve import (
    DUAL_CACHE_SIZE,
    LOCAL_ORDERS,
    RAMIFICATION_POINTS,
    CurvePoint,
    abel_jacobi,
    branch_equation_residual,
    check_z,
    cubic_residuals,
    diagram_check,
    dual_basis,
    eta_from_base,
    fn_fminus,
    fn_fplus,
    fn_hpm,
    fn_s,
    iota_pt,
    local_order,
    path_integral,
    phi2_vanishing_check,
    s_expressions,
    sigma_pt,
    theta_exprs_check,
    v_pm,
)
from errors import DomainError, PathError, PoleError
from numerics import TorusPoint, torus_distance
from periods import PathSegment, eta_segment


def _distance(p: CurvePoint, q: CurvePoint) -> float:
    return abs(p.v - q.v) + abs(p.w - q.w) + (p.branch != q.branch)


class TestPoints(unittest.TestCase):
    def test_check_z(self):
        for z in (0, 1, -0.5, 0.5 + 0.1j, 1 - 1e-9):
            with self.subTest(case=f"z = {z}"):
                with self.assertRaises(DomainError):
                    check_z(z)
        self.assertEqual(check_z(0.5), 0.5)

    def test_construction(self):
        with self.assertRaises(DomainError):
            CurvePoint(0.0, 0, 0.5)
        with self.assertRaises(DomainError):
            CurvePoint(2.0, 0, 0.5)
        with self.assertRaises(DomainError):
            CurvePoint(0.0, 0, 0.5, "P2")
        for name in RAMIFICATION_POINTS:
            with self.subTest(case=name):
                point = CurvePoint.at_ramification(name, 0.5)
                self.assertTrue(point.is_ramification)
                self.assertEqual(point.curve_residual(), 0.0)

    def test_branch_convention(self):
        test_cases = [
            {"name": "positive on (0, 1)", "v": 0.3, "arg": 0.0},
            {"name": "beyond 1/z", "v": 3.0, "arg": -math.pi / 2},
            {"name": "between 1 and 1/z", "v": 1.5, "arg": -math.pi / 4},
            {"name": "negative axis", "v": -1.0, "arg": 3 * math.pi / 4},
        ]
        for case in test_cases:
            with self.subTest(case=case["name"]):
                w = CurvePoint(case["v"], 0, 0.5).w
                self.assertAlmostEqual(cmath.phase(w), case["arg"], places=12)

    def test_curve_equation(self):
        for v in (0.3, -2.0, 1.5, 3.0, 0.4 + 0.3j):
            for branch in range(4):
                with self.subTest(case=f"v = {v}, branch {branch}"):
                    self.assertLess(CurvePoint(v, branch, 0.5).curve_residual(), 1e-13)

    def test_sigma_and_iota(self):
        p = CurvePoint(0.3, 1, 0.5)
        self.assertAlmostEqual(sigma_pt(p).w, 1j * p.w, places=14)
        ramification = CurvePoint.at_ramification("P1z", 0.5)
        self.assertEqual(sigma_pt(ramification), ramification)
        exchanged = {"P0": "P1", "P1": "P0", "P1z": "Pinf", "Pinf": "P1z"}
        for name, image in exchanged.items():
            with self.subTest(case=name):
                point = iota_pt(CurvePoint.at_ramification(name, 0.5))
                self.assertEqual(point.ramification, image)
        self.assertAlmostEqual(iota_pt(p).v, 0.7 / 0.85, places=14)

    def test_v_pm(self):
        z = 0.5
        for root in v_pm(z):
            with self.subTest(case=f"root {root}"):
                self.assertAlmostEqual(z * root**2 - 2 * root + 1, 0, places=14)
        v_plus, v_minus = v_pm(z)
        self.assertLess(v_minus.real, 1)
        self.assertGreater(v_plus.real, 1 / z)
        with self.assertRaises(DomainError):
            v_pm(0)

    @settings(max_examples=100, deadline=None)
    @given(
        v=st.floats(0.02, 0.98),
        branch=st.integers(0, 3),
        z=st.sampled_from([0.3, 0.5, 0.7]),
    )
    def test_dihedral_relations(self, v, branch, z):
        p = CurvePoint(v, branch, z)
        self.assertEqual(sigma_pt(sigma_pt(sigma_pt(sigma_pt(p)))), p)
        self.assertLess(_distance(iota_pt(iota_pt(p)), p), 1e-10)
        twisted = sigma_pt(sigma_pt(sigma_pt(iota_pt(p))))
        self.assertLess(_distance(iota_pt(sigma_pt(p)), twisted), 1e-10)


class TestFunctions(unittest.TestCase):
    def test_poles_at_ramification_points(self):
        point = CurvePoint.at_ramification("P0", 0.5)
        for function in (fn_s, fn_fplus, fn_fminus, s_expressions):
            with self.subTest(case=function.__name__):
                with self.assertRaises(PoleError):
                    function(point)
        with self.assertRaises(PoleError):
            fn_hpm(1, 0, 0.5)

    def test_s_expressions_agree(self):
        for v in (0.35, 1.4, -0.7):
            with self.subTest(case=f"v = {v}"):
                values = s_expressions(CurvePoint(v, 2, 0.5))
                for value in values[1:]:
                    self.assertLess(abs(value - values[0]), 1e-12 * max(1, abs(values[0])))

    def test_function_algebra(self):
        z = 0.5
        for v in (0.15, 0.55, 1.3):
            for branch in range(4):
                with self.subTest(case=f"v = {v}, branch {branch}"):
                    p = CurvePoint(v, branch, z)
                    s = fn_s(p)
                    scale = max(1.0, abs(s))
                    self.assertLess(abs(fn_s(iota_pt(p)) - s) / scale, 1e-10)
                    self.assertLess(abs(fn_fplus(p) ** 2 + z * fn_hpm(1, s, z)) / scale, 1e-10)
                    self.assertLess(abs(fn_fminus(p) ** 2 + z * fn_hpm(-1, s, z)) / scale, 1e-10)
                    self.assertLess(diagram_check(p), 1e-10)
                    self.assertLess(max(cubic_residuals(p)), 1e-10)

    def test_local_orders(self):
        for function, table in LOCAL_ORDERS.items():
            for point, order in table.items():
                with self.subTest(case=f"{function} at {point}"):
                    self.assertEqual(local_order(function, point, 0.5), order)

    def test_local_orders_of_h(self):
        for z in (0.3, 0.7):
            for function in ("h_plus", "h_minus"):
                for point in RAMIFICATION_POINTS:
                    with self.subTest(case=f"{function} at {point}, z = {z}"):
                        self.assertEqual(local_order(function, point, z), -2)

    def test_unknown_local_orders(self):
        with self.assertRaises(DomainError):
            local_order("s", "P0", 0.5)
        with self.assertRaises(DomainError):
            local_order("w", "P2", 0.5)


class TestDualBasisCache(unittest.TestCase):
    def setUp(self):
        curve._dual_basis.cache_clear()
        self.addCleanup(curve._dual_basis.cache_clear)

    @mock.patch("curve.eta_segment", return_value=1 + 0j)
    def test_cache_is_bounded(self, _eta_segment):
        for k in range(DUAL_CACHE_SIZE + 8):
            dual_basis(0.1 + k * 0.01)
        info = curve._dual_basis.cache_info()
        self.assertEqual(info.maxsize, DUAL_CACHE_SIZE)
        self.assertEqual(info.currsize, DUAL_CACHE_SIZE)

    @mock.patch("curve.eta_segment", return_value=1 + 0j)
    def test_repeated_z_is_reused(self, eta_segment):
        first = dual_basis(0.4)
        self.assertIs(dual_basis(0.4), first)
        self.assertEqual(eta_segment.call_count, 4)
        self.assertEqual(curve._dual_basis.cache_info().hits, 1)


class TestAbelJacobi(unittest.TestCase):
    z = 0.5

    def setUp(self):
        self.dual = dual_basis(self.z)

    def test_dual_basis(self):
        self.assertEqual(dual_basis(self.z), self.dual)
        beta1 = self.dual.phi_periods("beta1")
        beta2 = self.dual.phi_periods("beta2")
        self.assertAlmostEqual(beta1[0], 1, places=12)
        self.assertAlmostEqual(beta1[1], 0, places=12)
        self.assertAlmostEqual(beta2[0], 0, places=12)
        self.assertAlmostEqual(beta2[1], 1, places=12)
        self.assertGreater(self.dual.tau.imag, 0)
        self.assertLess(abs(self.dual.tau.real), 1e-9)

    def test_path_integral_matches_phase_table(self):
        base = path_integral(1, PathSegment.I01, self.z, 0)
        expected = eta_segment(1, PathSegment.I01, self.z)
        self.assertLess(abs(base - expected), 1e-9 * abs(expected))
        sheet = path_integral(1, PathSegment.I01, self.z, 1)
        self.assertLess(abs(sheet + 1j * base), 1e-9)

    def test_anchors(self):
        tau = self.dual.tau
        expected = {
            "P0": (0, 0),
            "P1": (0, 0),
            "P1z": ((tau + 1) / 2, (tau + 1) / 2),
            "Pinf": ((tau + 1) / 2, (tau - 1) / 2),
        }
        for name, (e1, e2) in expected.items():
            with self.subTest(case=name):
                y1, y2 = abel_jacobi(CurvePoint.at_ramification(name, self.z), dual=self.dual)
                self.assertLess(torus_distance(y1, TorusPoint(e1, tau)), 1e-8)
                self.assertLess(torus_distance(y2, TorusPoint(e2, tau)), 1e-8)

    def test_v_minus_maps_to_half(self):
        _, v_minus = v_pm(self.z)
        y1, _ = abel_jacobi(CurvePoint(v_minus.real, 0, self.z), dual=self.dual)
        self.assertLess(torus_distance(y1, TorusPoint(0.5, self.dual.tau)), 1e-8)
        vanishing, other = phi2_vanishing_check(self.z)
        self.assertLess(vanishing, 1e-8)
        self.assertGreater(other, 1e-2)

    def test_no_path(self):
        test_cases = [
            {"name": "non-real point", "point": CurvePoint(0.3 + 0.1j, 0, self.z)},
            {"name": "beyond 1/z", "point": CurvePoint(3.0, 0, self.z)},
            {"name": "negative axis", "point": CurvePoint(-1.0, 0, self.z)},
        ]
        for case in test_cases:
            with self.subTest(case=case["name"]):
                with self.assertRaises(PathError):
                    eta_from_base(case["point"])

    def test_theta_expressions(self):
        for v in (0.15, 0.55, 1.4):
            with self.subTest(case=f"v = {v}"):
                residuals = theta_exprs_check(CurvePoint(v, 0, self.z), dual=self.dual)
                self.assertLess(max(residuals.values()), 1e-8, residuals)

    def test_branch_equation(self):
        self.assertLess(branch_equation_residual(self.z, self.dual.tau), 1e-10)
