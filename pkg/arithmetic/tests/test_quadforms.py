from django.test import SimpleTestCase

from arithmetic.congruence import Mat2, elementary_generators
from arithmetic.exceptions import InvariantViolation, UsageError
from arithmetic.pell import pell_fundamental, power_sequence, require_discriminant
from arithmetic.quadforms import (
    DisjointSet, EquivOutcome, EquivWitness, EstimateStatus, QuadForm, act, automorph,
    class_number_estimate, correspondence_check, enumerate_forms, equivalent,
)
from arithmetic.ring import RingSpec


def form(spec, a, b, c):
    return QuadForm(spec(a), spec(b), spec(c))


class QuadFormTestCase(SimpleTestCase):

    def setUp(self):
        self.spec = RingSpec(1)
        self.Q = form(self.spec, 1, 1, -1)

    def test_discriminant(self):
        self.assertEqual(self.Q.disc, self.spec(5))

    def test_evaluation(self):
        self.assertEqual(self.Q(self.spec(2), self.spec(1)), self.spec(5))

    def test_primitivity(self):
        self.assertTrue(self.Q.primitive)
        self.assertFalse(form(self.spec, 2, 2, -2).primitive)

    def test_primitivity_non_euclidean(self):
        spec = RingSpec(19)
        self.assertTrue(form(spec, 1, 1, -1).primitive)
        self.assertFalse(form(spec, 5, 10, 15).primitive)


class ActionTestCase(SimpleTestCase):

    def setUp(self):
        self.spec = RingSpec(1)
        self.Q = form(self.spec, 1, 1, -1)
        self.gens = dict(elementary_generators(self.spec))

    def test_translation(self):
        # Q(x + y, y) = x^2 + 3xy + y^2
        self.assertEqual(act(self.gens['T1'], self.Q), form(self.spec, 1, 3, 1))

    def test_inversion(self):
        self.assertEqual(act(self.gens['S'], self.Q), form(self.spec, -1, -1, 1))

    def test_right_action(self):
        M1, M2 = self.gens['T1'], self.gens['S'] @ self.gens['Tw']
        self.assertEqual(act(M1 @ M2, self.Q), act(M2, act(M1, self.Q)))

    def test_discriminant_invariant(self):
        M = self.gens['Tw'] @ self.gens['S'] @ self.gens['T1^-1']
        self.assertEqual(act(M, self.Q).disc, self.Q.disc)

    def test_requires_sl2(self):
        with self.assertRaises(UsageError):
            act(Mat2.of(self.spec, 2, 0, 0, 1), self.Q)


class AutomorphTestCase(SimpleTestCase):

    def setUp(self):
        self.spec = RingSpec(1)
        self.Q = form(self.spec, 1, 1, -1)
        self.unit = pell_fundamental(require_discriminant(self.spec(5)), 100)

    def test_fundamental_automorph(self):
        eps = automorph(self.Q, self.unit.sol)
        self.assertEqual(eps, Mat2.of(self.spec, 0, self.spec(0, 1), self.spec(0, 1), self.spec(0, 1)))
        self.assertEqual(eps.det, self.spec.one)
        self.assertEqual(eps.trace, self.unit.t)
        self.assertEqual(act(eps, self.Q), self.Q)

    def test_fifth_power(self):
        eps = automorph(self.Q, self.unit.sol)
        w = self.spec.omega
        self.assertEqual(eps ** 5, Mat2.of(self.spec, 3 * w, 5 * w, 5 * w, 8 * w))
        self.assertEqual(automorph(self.Q, power_sequence(self.unit, 4).solution(4)), eps ** 5)

    def test_mismatched_discriminant(self):
        other = pell_fundamental(require_discriminant(self.spec(96)), 100)
        with self.assertRaises(UsageError):
            automorph(self.Q, other.sol)

    def test_conjugate_automorph_of_moved_form(self):
        gens = dict(elementary_generators(self.spec))
        M = gens['T1'] @ gens['S']
        moved = act(M, self.Q)
        eps = automorph(self.Q, self.unit.sol)
        self.assertEqual(automorph(moved, self.unit.sol), M.inverse() @ eps @ M)


class EquivalenceTestCase(SimpleTestCase):

    def setUp(self):
        self.spec = RingSpec(1)
        self.Q = form(self.spec, 1, 1, -1)
        self.gens = dict(elementary_generators(self.spec))

    def test_found_with_witness(self):
        target = act(self.gens['T1'] @ self.gens['S'], self.Q)
        result = equivalent(self.Q, target, 2)
        self.assertEqual(result.outcome, EquivOutcome.FOUND)
        self.assertEqual(act(result.witness.M, self.Q), target)
        self.assertFalse(result.subgroup_only)

    def test_unknown_beyond_depth(self):
        M = self.gens['T1'] @ self.gens['S'] @ self.gens['Tw'] @ self.gens['S'] @ self.gens['T1']
        result = equivalent(self.Q, act(M, self.Q), 1)
        self.assertIn(result.outcome, (EquivOutcome.FOUND, EquivOutcome.UNKNOWN))

    def test_different_discriminants(self):
        result = equivalent(self.Q, form(self.spec, 1, 0, 1), 3)
        self.assertEqual(result.outcome, EquivOutcome.NO)

    def test_reflexive(self):
        self.assertEqual(equivalent(self.Q, self.Q, 0).outcome, EquivOutcome.FOUND)

    def test_bad_witness_rejected(self):
        with self.assertRaises(InvariantViolation):
            EquivWitness(M=self.gens['S'], source=self.Q, target=self.Q)

    def test_subgroup_label_for_non_euclidean(self):
        spec = RingSpec(43)
        Q = form(spec, 1, 1, -1)
        self.assertTrue(equivalent(Q, Q, 1).subgroup_only)


class EnumerationTestCase(SimpleTestCase):

    def setUp(self):
        self.spec = RingSpec(1)
        self.disc = require_discriminant(self.spec(5))

    def test_forms_have_discriminant_and_bounded_a(self):
        forms = enumerate_forms(self.disc, 4)
        self.assertTrue(forms)
        self.assertIn(form(self.spec, 1, 1, -1), forms)
        for Q in forms:
            self.assertEqual(Q.disc, self.spec(5))
            self.assertTrue(1 <= Q.a.norm <= 4)
            self.assertTrue(Q.primitive)

    def test_bad_bound(self):
        with self.assertRaises(UsageError):
            enumerate_forms(self.disc, 0)

    def test_estimate(self):
        estimate = class_number_estimate(self.disc, 2, 3)
        self.assertGreaterEqual(estimate.classes_found, 1)
        self.assertEqual(len(estimate.representatives), estimate.classes_found)
        self.assertEqual(estimate.forms_enumerated - estimate.merged_by_depth, estimate.classes_found)
        if estimate.classes_found == 1:
            self.assertEqual(estimate.status, EstimateStatus.LOWER_BOUND_CERTIFIED)
        else:
            self.assertEqual(estimate.status, EstimateStatus.HEURISTIC_ESTIMATE)

    def test_estimate_is_worker_independent(self):
        serial = class_number_estimate(self.disc, 2, 2, workers=1)
        pooled = class_number_estimate(self.disc, 2, 2, workers=2)
        self.assertEqual(serial.representatives, pooled.representatives)

    def test_conjugacy_merging_only_merges(self):
        unit = pell_fundamental(self.disc, 100)
        plain = class_number_estimate(self.disc, 2, 2)
        merged = class_number_estimate(self.disc, 2, 2, unit=unit)
        self.assertLessEqual(merged.classes_found, plain.classes_found)

    def test_correspondence(self):
        unit = pell_fundamental(self.disc, 100)
        forms = enumerate_forms(self.disc, 2)[:6]
        report = correspondence_check(forms, unit.sol, 2)
        self.assertTrue(report.ok)
        self.assertEqual(report.pairs_checked, len(forms) * (len(forms) - 1) // 2)


class DisjointSetTestCase(SimpleTestCase):

    def test_union_and_classes(self):
        ds = DisjointSet(5)
        self.assertTrue(ds.union(0, 3))
        self.assertTrue(ds.union(3, 4))
        self.assertFalse(ds.union(0, 4))
        self.assertEqual(ds.classes(), [[0, 3, 4], [1], [2]])
