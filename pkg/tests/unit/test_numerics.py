import cmath
import math
import unittest
from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from errors import DomainError, NonConvergent, PoleError
from numerics import (
    Tolerance,
    TorusPoint,
    UnitPhase,
    beta_fn,
    e_phase,
    fourth_root,
    gamma_fn,
    integrate_de,
    integrate_de_square,
    lattice_coords,
    torus_distance,
    torus_eq,
    torus_reduce,
)


class TestTolerance(unittest.TestCase):
    def test_defaults(self):
        tol = Tolerance()
        self.assertEqual(tol.abs_eps, 1e-12)
        self.assertEqual(tol.rel_eps, 1e-11)
        self.assertEqual(tol.quad_levels, 12)
        self.assertEqual(tol.theta_trunc_eps, 1e-16)

    def test_target(self):
        tol = Tolerance()
        self.assertEqual(tol.target(0.0), 1e-12)
        self.assertAlmostEqual(tol.target(1000.0), 1e-8, places=20)

    def test_invalid_values(self):
        test_cases = [
            {"name": "zero abs_eps", "values": {"abs_eps": 0.0}},
            {"name": "negative rel_eps", "values": {"rel_eps": -1e-3}},
            {"name": "too many levels", "values": {"quad_levels": 17}},
            {"name": "no levels", "values": {"quad_levels": 0}},
        ]
        for case in test_cases:
            with self.subTest(case=case["name"]):
                with self.assertRaises(ValidationError):
                    Tolerance(**case["values"])

    def test_frozen(self):
        with self.assertRaises(ValidationError):
            Tolerance().abs_eps = 1.0


class TestPhasesAndSpecialFunctions(unittest.TestCase):
    def test_e_phase(self):
        test_cases = [
            {"name": "zero", "q": 0, "expected": 1},
            {"name": "quarter", "q": Fraction(1, 4), "expected": 1j},
            {"name": "half", "q": "1/2", "expected": -1},
            {"name": "three eighths", "q": "3/8", "expected": cmath.exp(0.75j * math.pi)},
            {"name": "negative", "q": Fraction(-1, 4), "expected": -1j},
            {
                "name": "off the eighths",
                "q": Fraction(1, 3),
                "expected": cmath.exp(2j * math.pi / 3),
            },
        ]
        for case in test_cases:
            with self.subTest(case=case["name"]):
                self.assertAlmostEqual(e_phase(case["q"]), case["expected"], places=15)

    def test_unit_phase_product(self):
        product = UnitPhase(Fraction(3, 8)) * UnitPhase(Fraction(7, 8))
        self.assertEqual(product.q, Fraction(1, 4))
        self.assertEqual(UnitPhase(Fraction(1, 8)).conjugate().q, Fraction(7, 8))

    def test_gamma_and_beta(self):
        self.assertAlmostEqual(gamma_fn(0.5), math.sqrt(math.pi), places=14)
        self.assertAlmostEqual(gamma_fn(5), 24, places=10)
        self.assertAlmostEqual(beta_fn(0.5, 0.5), math.pi, places=13)
        self.assertAlmostEqual(beta_fn(0.25, 0.5), beta_fn(0.25, 0.25) / math.sqrt(2), places=12)
        self.assertEqual(beta_fn(0.5, -0.5), 0j)
        self.assertAlmostEqual(gamma_fn(1 + 1j), complex(0.4980156681183560, -0.1549498283018107))

    def test_poles(self):
        test_cases = [
            {"name": "gamma at zero", "call": lambda: gamma_fn(0)},
            {"name": "gamma at -3", "call": lambda: gamma_fn(-3.0)},
            {"name": "beta at -1", "call": lambda: beta_fn(1, -1)},
        ]
        for case in test_cases:
            with self.subTest(case=case["name"]):
                with self.assertRaises(PoleError):
                    case["call"]()


class TestQuadrature(unittest.TestCase):
    def test_integrate_de(self):
        test_cases = [
            {
                "name": "smooth",
                "f": lambda t, da, db: np.exp(t),
                "interval": (0.0, 1.0),
                "exponents": (0.0, 0.0),
                "expected": math.e - 1,
            },
            {
                "name": "left square root singularity",
                "f": lambda t, da, db: da**-0.5,
                "interval": (0.0, 1.0),
                "exponents": (-0.5, 0.0),
                "expected": 2.0,
            },
            {
                "name": "right three quarter singularity",
                "f": lambda t, da, db: db**-0.75,
                "interval": (0.0, 1.0),
                "exponents": (0.0, -0.75),
                "expected": 4.0,
            },
            {
                "name": "beta integrand on a shifted interval",
                "f": lambda t, da, db: (da * db) ** -0.75,
                "interval": (2.0, 3.0),
                "exponents": (-0.75, -0.75),
                "expected": beta_fn(0.25, 0.25).real,
            },
        ]
        for case in test_cases:
            with self.subTest(case=case["name"]):
                a, b = case["interval"]
                value = integrate_de(case["f"], a, b, case["exponents"])
                self.assertLess(abs(value - case["expected"]), 1e-10 * abs(case["expected"]))

    def test_integrate_de_rejects(self):
        test_cases = [
            {"name": "reversed interval", "args": (1.0, 0.0, (0.0, 0.0))},
            {"name": "non integrable endpoint", "args": (0.0, 1.0, (-1.0, 0.0))},
        ]
        for case in test_cases:
            with self.subTest(case=case["name"]):
                with self.assertRaises(DomainError):
                    integrate_de(lambda t, da, db: t, *case["args"])

    def test_integrate_de_non_convergent(self):
        with self.assertRaises(NonConvergent):
            integrate_de(
                lambda t, da, db: np.cos(200 * t), 0.0, 1.0, tol=Tolerance(quad_levels=1)
            )

    def test_integrate_de_square(self):
        value = integrate_de_square(
            lambda d1, c1, d2, c2: d1**-0.5 * d2**-0.5, (-0.5, 0.0, -0.5, 0.0)
        )
        self.assertAlmostEqual(value, 4.0, places=8)
        value = integrate_de_square(lambda d1, c1, d2, c2: d1 * d2 + 0 * c1 * c2, (0.0,) * 4)
        self.assertAlmostEqual(value, 0.25, places=10)


class TestTorus(unittest.TestCase):
    def test_invalid_tau(self):
        with self.assertRaises(DomainError):
            TorusPoint(0.5, -1j)

    def test_reduce(self):
        tau = 0.3 + 1.2j
        point = torus_reduce(TorusPoint(1.7 * tau + 2.4, tau))
        p, q = point.coords
        self.assertAlmostEqual(p, 0.7, places=12)
        self.assertAlmostEqual(q, 0.4, places=12)

    def test_equality_modulo_lattice(self):
        tau = 1.5j
        first = TorusPoint(0.2 + 0.1j, tau)
        self.assertTrue(torus_eq(first, TorusPoint(0.2 + 0.1j + 3 * tau - 2, tau)))
        self.assertFalse(torus_eq(first, TorusPoint(0.25 + 0.1j, tau)))
        with self.assertRaises(DomainError):
            torus_distance(first, TorusPoint(0.2, 2j))

    def test_lattice_coords(self):
        p, q = lattice_coords(0.5 * (1 + 2j) + 0.25, 1 + 2j)
        self.assertAlmostEqual(p, 0.5)
        self.assertAlmostEqual(q, 0.25)

    def test_fourth_root(self):
        self.assertAlmostEqual(fourth_root(16), 2)
        self.assertEqual(fourth_root(0), 0j)
        self.assertAlmostEqual(fourth_root(-1), cmath.exp(0.25j * math.pi))

    @settings(max_examples=200, deadline=None)
    @given(
        p=st.floats(-50, 50),
        q=st.floats(-50, 50),
        re_tau=st.floats(-1, 1),
        im_tau=st.floats(0.5, 3),
    )
    def test_reduce_lands_in_fundamental_domain(self, p, q, re_tau, im_tau):
        tau = complex(re_tau, im_tau)
        point = TorusPoint(p * tau + q, tau)
        reduced = torus_reduce(point)
        rp, rq = reduced.coords
        self.assertTrue(0 <= rp < 1 and 0 <= rq < 1)
        self.assertLess(torus_distance(point, reduced), 1e-9)
