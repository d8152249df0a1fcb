import mpmath
from django.test import SimpleTestCase

from arithmetic.exceptions import CapExceeded, InvariantViolation, PellNotFound, UsageError
from arithmetic.pell import (
    BoundReport, FundamentalUnit, PellSolution, SearchStatus, below_threshold, discriminants_up_to,
    in_guaranteed_regime, is_discriminant, m_index, pell_compose, pell_fundamental, power_sequence,
    require_discriminant, verify_pell_bounds,
)
from arithmetic.precision import Verdict
from arithmetic.ring import RingSpec


class DiscriminantTestCase(SimpleTestCase):

    def setUp(self):
        self.spec = RingSpec(1)

    def test_accepts_square_classes_mod_four(self):
        for value in (5, 3, 96):
            self.assertIsNotNone(is_discriminant(self.spec(value)), value)

    def test_rejects_squares(self):
        self.assertIsNone(is_discriminant(self.spec(4)))
        self.assertIsNone(is_discriminant(self.spec(-1)))
        self.assertIsNone(is_discriminant(self.spec(0, 2)))

    def test_rejects_non_residues(self):
        # squares mod 4 in Z[i] are 0, 1, -1, 2i
        self.assertIsNone(is_discriminant(self.spec(2)))
        with self.assertRaises(UsageError):
            require_discriminant(self.spec(2))

    def test_listing(self):
        found = discriminants_up_to(self.spec, 25)
        values = [disc.D for disc in found]
        self.assertIn(self.spec(5), values)
        self.assertIn(self.spec(3), values)
        self.assertNotIn(self.spec(4), values)
        self.assertTrue(all(disc.norm <= 25 for disc in found))


class FundamentalSolutionTestCase(SimpleTestCase):
    """Worked instance over Z[i] with D = 5"""

    def setUp(self):
        self.spec = RingSpec(1)
        self.disc = require_discriminant(self.spec(5))
        self.unit = pell_fundamental(self.disc, 100)

    def test_fundamental(self):
        self.assertEqual(self.unit.t, self.spec(0, 1))
        self.assertEqual(self.unit.u, self.spec(0, 1))
        self.assertEqual(self.unit.status, SearchStatus.CERTIFIED_WITHIN_BOUND)
        self.assertTrue(self.unit.globally_minimal)

    def test_eps_is_golden_ratio(self):
        golden = (1 + mpmath.sqrt(5)) / 2
        self.assertLess(abs(self.unit.eps_abs - golden), 1e-9)

    def test_small_d_warning(self):
        self.assertEqual(self.unit.warnings, ())
        small = pell_fundamental(require_discriminant(self.spec(3)), 50)
        self.assertTrue(small.warnings)

    def test_power_sequence(self):
        seq = power_sequence(self.unit, 4)
        self.assertEqual((seq.t(1), seq.u(1)), (self.spec(-3), self.spec(-1)))
        self.assertEqual((seq.t(2), seq.u(2)), (self.spec(0, -4), self.spec(0, -2)))
        self.assertEqual((seq.t(3), seq.u(3)), (self.spec(7), self.spec(3)))
        self.assertEqual((seq.t(4), seq.u(4)), (self.spec(0, 11), self.spec(0, 5)))

    def test_m_index(self):
        self.assertEqual(m_index(self.unit, 8), 4)
        self.assertFalse(in_guaranteed_regime(4))
        with self.assertRaises(CapExceeded):
            m_index(self.unit, 3)
        with self.assertRaises(UsageError):
            m_index(self.unit, 1)

    def test_threshold(self):
        self.assertTrue(below_threshold(self.spec(0, 11), self.spec(0, 5)))
        self.assertFalse(below_threshold(self.spec(7), self.spec(3)))

    def test_empty_budget(self):
        with self.assertRaises(PellNotFound):
            pell_fundamental(self.disc, 0)

    def test_compose(self):
        sol = self.unit.sol
        identity = PellSolution(self.spec(2), self.spec(0), self.disc)
        self.assertEqual(pell_compose(sol, sol.inverse()), identity)
        self.assertEqual(pell_compose(sol, identity), sol)
        seq = power_sequence(self.unit, 2)
        self.assertEqual(pell_compose(sol, seq.solution(1)), seq.solution(2))

    def test_compose_rejects_mixed_discriminants(self):
        other = pell_fundamental(require_discriminant(self.spec(96)), 100).sol
        with self.assertRaises(UsageError):
            pell_compose(self.unit.sol, other)

    def test_non_solution_rejected(self):
        with self.assertRaises(InvariantViolation):
            PellSolution(self.spec(1), self.spec(1), self.disc)

    def test_user_supplied_solution(self):
        unit = FundamentalUnit.from_solution(self.unit.sol)
        self.assertEqual(unit.status, SearchStatus.UNKNOWN)
        self.assertFalse(unit.globally_minimal)


class LargeDiscriminantTestCase(SimpleTestCase):

    def setUp(self):
        self.spec = RingSpec(1)
        self.unit = pell_fundamental(require_discriminant(self.spec(96)), 100)

    def test_fundamental(self):
        self.assertEqual((self.unit.t, self.unit.u), (self.spec(10), self.spec(1)))

    def test_second_power(self):
        seq = power_sequence(self.unit, 2)
        self.assertEqual((seq.t(2), seq.u(2)), (self.spec(970), self.spec(99)))
        self.assertEqual(m_index(self.unit, 8), 2)
        self.assertTrue(in_guaranteed_regime(2))


class BoundReportTestCase(SimpleTestCase):

    def setUp(self):
        self.spec = RingSpec(1)

    def test_all_bounds_hold_for_d5(self):
        unit = pell_fundamental(require_discriminant(self.spec(5)), 100)
        report = verify_pell_bounds(unit, 6)
        self.assertTrue(report.ok, report.failures)
        self.assertEqual(report.verdict('growth_lower', 0), Verdict.PASS)
        self.assertEqual(report.verdict('growth_upper', 6), Verdict.PASS)
        self.assertIsNone(report.verdict('m_regime', 0))

    def test_rows_are_csv_shaped(self):
        unit = pell_fundamental(require_discriminant(self.spec(96)), 100)
        report = verify_pell_bounds(unit, 3)
        self.assertEqual(BoundReport.CSV_COLUMNS, ('lemma', 'n', 'lhs', 'rhs', 'verdict'))
        for row in report.rows:
            self.assertEqual(len(row.as_row()), 5)
        self.assertTrue(report.ok)

    def test_growth_over_small_discriminants(self):
        for d in (1, 2, 3):
            spec = RingSpec(d)
            for disc in discriminants_up_to(spec, 40):
                try:
                    unit = pell_fundamental(disc, 400)
                except PellNotFound:
                    continue
                report = verify_pell_bounds(unit, 6)
                self.assertTrue(report.ok, (d, str(disc), report.failures))


class GrowthPrecisionTestCase(SimpleTestCase):
    """|eps|^(2(n+1)) sits within a few units of N(t_n); the comparison needs full precision"""

    def unit(self, d, D, t, u):
        spec = RingSpec(d)
        sol = PellSolution(spec(*t), spec(*u), require_discriminant(spec(*D)))
        return FundamentalUnit.from_solution(sol)

    def assertGrowthHolds(self, unit, n):
        report = verify_pell_bounds(unit, n)
        self.assertEqual(report.verdict('growth_lower', n), Verdict.PASS)
        self.assertEqual(report.verdict('growth_upper', n), Verdict.PASS)
        self.assertTrue(report.ok, report.failures)

    def test_sqrt_minus_two_ring(self):
        self.assertGrowthHolds(self.unit(2, (-20, 0), (38, 0), (0, -6)), 5)

    def test_eisenstein_ring(self):
        self.assertGrowthHolds(self.unit(3, (-20, 20), (18, 0), (4, -4)), 6)

    def test_eps_abs_keeps_working_precision(self):
        unit = self.unit(2, (-20, 0), (38, 0), (0, -6))
        self.assertIsInstance(unit.eps_abs, mpmath.mpf)
        with mpmath.workdps(80):
            gap = abs(unit.eps_abs ** 12 - unit.sol.abs_eps() ** 12)
        self.assertLess(gap, 1e-9)
