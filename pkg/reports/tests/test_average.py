import math

import mpmath
from django.test import SimpleTestCase

from arithmetic.exceptions import EmptyScan, UsageError
from reports.average import (
    AverageEntry, derivative_check, fit_c_d, log_integral, model_value, sarnak_average,
)

GOLDEN = (1 + math.sqrt(5)) / 2


class LogIntegralTestCase(SimpleTestCase):

    def test_starts_at_two(self):
        self.assertEqual(float(log_integral(2)), 0.0)

    def test_matches_offset_li(self):
        self.assertAlmostEqual(float(log_integral(10)), float(mpmath.li(10, offset=True)), places=12)

    def test_below_two(self):
        with self.assertRaises(UsageError):
            log_integral(1.5)

    def test_derivative_is_reciprocal_log(self):
        rows = derivative_check([3, 10, 16, 100])
        self.assertEqual(len(rows), 4)
        for u, slope, expected, ok in rows:
            self.assertTrue(ok, (u, slope))
            self.assertAlmostEqual(slope, 1 / math.log(u), places=9)

    def test_derivative_needs_u_above_two(self):
        with self.assertRaises(UsageError):
            derivative_check([2])


class FitTestCase(SimpleTestCase):

    def test_single_point_fit(self):
        entries = [AverageEntry(D='5', eps_abs=2.0, h_estimate=3, h_status='HeuristicEstimate')]
        expected = float(log_integral(16)) / 4 / 3
        self.assertAlmostEqual(fit_c_d(entries), expected, places=9)

    def test_no_usable_points(self):
        entries = [AverageEntry(D='5', eps_abs=1.1, h_estimate=1, h_status='LowerBoundCertified')]
        self.assertIsNone(fit_c_d(entries))

    def test_model_value(self):
        self.assertIsNone(model_value(2.0, None))
        self.assertIsNone(model_value(1.1, 1.0))
        self.assertAlmostEqual(model_value(2.0, 0.5), float(log_integral(16)) / 2, places=9)


class SarnakAverageTestCase(SimpleTestCase):

    def test_small_table(self):
        table = sarnak_average(1, 2.0, scan_norm=25, pell_bound=100, a_bound=2, depth=2)
        by_d = {str(e.D): e for e in table.found}
        self.assertIn('5', by_d)
        self.assertAlmostEqual(by_d['5'].eps_abs, GOLDEN, places=9)
        self.assertTrue(all(1 < e.eps_abs <= 2.0 for e in table.found))
        self.assertGreaterEqual(table.empirical_mean, 1)
        self.assertTrue(table.c_d_fitted)
        self.assertGreaterEqual(table.discriminants_scanned, len(table.found))
        self.assertTrue(table.caveats)

    def test_given_constant_is_not_fitted(self):
        table = sarnak_average(1, 2.0, scan_norm=25, pell_bound=100, a_bound=2, depth=2, c_d=1.0)
        self.assertFalse(table.c_d_fitted)
        self.assertAlmostEqual(table.model_value, float(log_integral(16)) / 4, places=9)

    def test_empty_scan(self):
        with self.assertRaises(EmptyScan):
            sarnak_average(1, 2.0, scan_norm=1, pell_bound=100, a_bound=2, depth=2)

    def test_x_must_exceed_one(self):
        with self.assertRaises(UsageError):
            sarnak_average(1, 0.5, scan_norm=25, pell_bound=100, a_bound=2, depth=2)
