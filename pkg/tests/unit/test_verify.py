import unittest
from unittest import mock

from curve import dual_basis, theta_exprs_check
from verify import (
    CURVE_POINTS_PER_Z,
    CURVE_Z_SAMPLES,
    SUITES,
    CheckResult,
    above,
    below,
    curve_samples,
    exact,
    monodromy_suite,
    run_suites,
    theta_suite,
)


def _suite(name, passed=True):
    return lambda tol=None: [CheckResult(name, "identity", 0.0, 1.0, passed)]


class TestCheckResults(unittest.TestCase):
    def test_helpers(self):
        test_cases = [
            {"name": "below passes", "result": below("a", "x", 1e-13, 1e-12), "passed": True},
            {"name": "below fails", "result": below("a", "x", 1e-11, 1e-12), "passed": False},
            {
                "name": "below fails on nan",
                "result": below("a", "x", float("nan"), 1),
                "passed": False,
            },
            {"name": "above passes", "result": above("a", "x", 0.5, 1e-2), "passed": True},
            {"name": "above fails", "result": above("a", "x", 1e-3, 1e-2), "passed": False},
            {"name": "exact passes", "result": exact("a", "x", True), "passed": True},
            {"name": "exact fails", "result": exact("a", "x", False), "passed": False},
        ]
        for case in test_cases:
            with self.subTest(case=case["name"]):
                self.assertEqual(case["result"].passed, case["passed"])

    def test_as_dict(self):
        record = below("jacobi_identity", "theta01**4 + theta10**4 = theta00**4", 1e-15, 1e-12)
        self.assertEqual(
            record.as_dict(),
            {
                "check_id": "jacobi_identity",
                "identity": "theta01**4 + theta10**4 = theta00**4",
                "value": 1e-15,
                "threshold": 1e-12,
                "pass": True,
            },
        )


class TestRunSuites(unittest.TestCase):
    def test_known_suites(self):
        self.assertEqual(list(SUITES), ["theta", "periods", "curve", "schwarz", "monodromy"])

    def test_all_expands_in_order(self):
        fakes = {"first": _suite("one"), "second": _suite("two", passed=False)}
        with mock.patch.dict("verify.SUITES", fakes, clear=True):
            with self.assertLogs("verify", level="WARNING") as logs:
                results = run_suites(["all"])
        self.assertEqual([r.check_id for r in results], ["one", "two"])
        self.assertIn("two", "\n".join(logs.output))

    def test_single_suite(self):
        with mock.patch.dict("verify.SUITES", {"only": _suite("one")}, clear=True):
            results = run_suites(["only"])
        self.assertEqual(len(results), 1)
        self.assertTrue(results[0].passed)


class TestCurveSamples(unittest.TestCase):
    def test_twenty_points_on_both_paths(self):
        self.assertEqual(CURVE_POINTS_PER_Z, 20)
        for z in CURVE_Z_SAMPLES:
            with self.subTest(case=f"z = {z}"):
                points = curve_samples(z)
                self.assertEqual(len(points), 20)
                self.assertEqual(len({p.v for p in points}), 20)
                inner = [p for p in points if 0 < p.v.real < 1]
                outer = [p for p in points if 1 < p.v.real < 1 / z]
                self.assertEqual((len(inner), len(outer)), (12, 8))
                self.assertTrue(all(p.v.imag == 0 and p.branch == 0 for p in points))

    def test_theta_expressions_at_every_sample(self):
        for z in CURVE_Z_SAMPLES:
            dual = dual_basis(z)
            for p in curve_samples(z):
                with self.subTest(case=f"z = {z}, v = {p.v.real:.4f}"):
                    residuals = theta_exprs_check(p, dual=dual)
                    self.assertLess(max(residuals.values()), 1e-8, residuals)


class TestSuites(unittest.TestCase):
    def test_theta_suite_passes(self):
        for result in theta_suite():
            with self.subTest(case=result.check_id):
                self.assertTrue(result.passed, result)

    def test_monodromy_suite_passes(self):
        results = monodromy_suite(closure_length=3)
        self.assertIn("igusa_index=3", [r.check_id for r in results])
        for result in results:
            with self.subTest(case=result.check_id):
                self.assertTrue(result.passed, result)
