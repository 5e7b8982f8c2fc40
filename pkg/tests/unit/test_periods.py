import unittest
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from errors import DomainError
from hypergeo import DomainPoint
from numerics import e_phase
from periods import (
    ALPHA1,
    ALPHA2,
    BETA1,
    BETA2,
    LambdaClass,
    LambdaVector,
    PathSegment,
    alpha_period,
    beta_period,
    eta_segment,
    intersection,
    lambda_classify,
    lattice_index_chain,
    periods,
    reduced_solutions,
    segment_homology,
    segment_phase,
    sigma_on_lambda,
    tau_from_periods,
)


class TestSegments(unittest.TestCase):
    def test_segment_phase(self):
        test_cases = [
            {"name": "eta1 on (0, 1)", "j": 1, "seg": PathSegment.I01, "q": 0},
            {"name": "eta1 on (-oo, 0)", "j": 1, "seg": PathSegment.Iminf_0, "q": Fraction(-3, 8)},
            {"name": "eta1 on (1, 1/z)", "j": 1, "seg": PathSegment.I1_1z, "q": Fraction(1, 8)},
            {"name": "eta2 on (1, 1/z)", "j": 2, "seg": PathSegment.I1_1z, "q": Fraction(3, 8)},
            {"name": "eta3 on (1/z, oo)", "j": 3, "seg": PathSegment.I1z_inf, "q": Fraction(1, 2)},
        ]
        for case in test_cases:
            with self.subTest(case=case["name"]):
                self.assertEqual(segment_phase(case["j"], case["seg"]), e_phase(case["q"]))

    def test_eta_segment_rejects_degenerate_curve(self):
        with self.assertRaises(DomainError):
            eta_segment(1, PathSegment.I01, 1.0)

    def test_beta_and_alpha_periods(self):
        z = 0.5
        self.assertAlmostEqual(beta_period(1, 2, z), -1j * beta_period(1, 1, z), places=12)
        self.assertAlmostEqual(beta_period(2, 2, z), 1j * beta_period(2, 1, z), places=12)
        self.assertAlmostEqual(alpha_period(1, 2, z), -1j * alpha_period(1, 1, z), places=12)
        for j, i in ((3, 1), (1, 3)):
            with self.subTest(case=f"({j}, {i})"):
                with self.assertRaises(DomainError):
                    beta_period(j, i, z)
                with self.assertRaises(DomainError):
                    alpha_period(j, i, z)

    def test_tau_from_periods(self):
        for z in (0.1, 0.5, 0.9):
            with self.subTest(case=f"z = {z}"):
                first, second = tau_from_periods(z)
                self.assertLess(abs(first - second), 1e-9)
                self.assertLess(abs(first.real), 1e-9)
                self.assertGreater(first.imag, 0)


class TestSolutions(unittest.TestCase):
    def test_periods_with_executor_match(self):
        x = DomainPoint(0.2, 0.3)
        sequential = periods(x)
        with ThreadPoolExecutor(max_workers=4) as pool:
            parallel = periods(x, executor=pool)
        self.assertEqual(sequential, parallel)

    def test_periods_swap_symmetry(self):
        first = periods(DomainPoint(0.2, 0.3))
        second = periods(DomainPoint(0.3, 0.2))
        self.assertAlmostEqual(first.f3, second.f4, places=10)
        self.assertAlmostEqual(first.f1, second.f1, places=10)

    def test_periods_outside_chamber_warns(self):
        with self.assertLogs("periods", level="WARNING"):
            periods(DomainPoint(0.2 + 0.05j, 0.3))

    def test_reduced_solutions(self):
        solutions = reduced_solutions(DomainPoint(0.2, 0.3))
        self.assertEqual([s.name for s in solutions], ["D1", "D2", "D3", "D4"])
        for solution in solutions:
            with self.subTest(case=solution.name):
                gap = abs(solution.integral - solution.closed_form) / abs(solution.closed_form)
                self.assertLess(gap, 1e-8)


class TestLattice(unittest.TestCase):
    def test_classify(self):
        half = Fraction(1, 2)
        test_cases = [
            {"name": "alpha1", "coords": (1, 0, 0, 0), "class": LambdaClass.in_Lambda},
            {"name": "even sum", "coords": (1, 1, 0, 0), "class": LambdaClass.in_sublattice_1ms2},
            {"name": "all halves", "coords": (half,) * 4, "class": LambdaClass.in_Hminus},
            {"name": "mixed parity", "coords": (half, 0, 0, 0), "class": LambdaClass.outside},
            {"name": "thirds", "coords": (Fraction(1, 3), 0, 0, 0), "class": LambdaClass.outside},
        ]
        for case in test_cases:
            with self.subTest(case=case["name"]):
                self.assertEqual(lambda_classify(LambdaVector(case["coords"])), case["class"])

    def test_index_chain(self):
        self.assertEqual(lattice_index_chain(), (2, 2))

    def test_sigma(self):
        self.assertEqual(sigma_on_lambda(ALPHA1), ALPHA2)
        self.assertEqual(sigma_on_lambda(BETA1), BETA2)
        v = LambdaVector((1, Fraction(1, 2), -2, 3))
        four = sigma_on_lambda(sigma_on_lambda(sigma_on_lambda(sigma_on_lambda(v))))
        self.assertEqual(four, v)
        self.assertEqual(sigma_on_lambda(sigma_on_lambda(v)), v.scaled(-1))

    def test_intersection(self):
        self.assertEqual(intersection(ALPHA1, BETA1), -2)
        self.assertEqual(intersection(BETA1, ALPHA1), 2)
        self.assertEqual(intersection(ALPHA1, ALPHA2), 0)
        self.assertEqual(intersection(ALPHA1, BETA2), 0)

    def test_intersection_is_an_alternating_integer_form(self):
        vectors = [ALPHA1, ALPHA2, BETA1, BETA2, LambdaVector((1, -2, 3, 1))]
        for u in vectors:
            for v in vectors:
                with self.subTest(case=f"{u.coords} . {v.coords}"):
                    value = intersection(u, v)
                    self.assertIs(type(value), int)
                    self.assertEqual(value, -intersection(v, u))
                    self.assertEqual(
                        intersection(sigma_on_lambda(u), sigma_on_lambda(v)), value
                    )

    def test_intersection_rejects_half_integers(self):
        with self.assertRaises(DomainError):
            intersection(LambdaVector((Fraction(1, 2), 0, 0, 0)), BETA1)

    def test_segment_homology_sums_to_zero(self):
        total = LambdaVector((0, 0, 0, 0))
        for seg in PathSegment:
            total = total + segment_homology(seg)
        self.assertEqual(total, LambdaVector((0, 0, 0, 0)))
        self.assertEqual(segment_homology(PathSegment.I01), BETA1)

    def test_wrong_length(self):
        with self.assertRaises(DomainError):
            LambdaVector((1, 0, 0))
