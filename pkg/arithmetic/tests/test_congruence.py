import math

import numpy as np
from django.test import SimpleTestCase

from arithmetic.congruence import (
    CertVerdict, Mat2, Membership, Modulus, coset_trace_residue, conjugacy_search,
    elementary_generators, factor_modulus, level_index, make_level, member, principal_generators,
    principal_level, random_word, reduce_mat, sl2_order, sl2_order_bruteforce, systole_certificate,
    torsion_scan, trace_congruence_check,
)
from arithmetic.exceptions import UsageError
from arithmetic.pell import require_discriminant
from arithmetic.ring import RingSpec


class MatrixTestCase(SimpleTestCase):

    def setUp(self):
        self.spec = RingSpec(1)
        self.gens = dict(elementary_generators(self.spec))

    def test_generators_are_sl2(self):
        for name, M in elementary_generators(self.spec):
            self.assertEqual(M.det, self.spec.one, name)
            self.assertEqual(M @ M.inverse(), Mat2.identity(self.spec), name)

    def test_s_has_order_four(self):
        S = self.gens['S']
        self.assertEqual(S ** 2, -Mat2.identity(self.spec))
        self.assertEqual(S ** 4, Mat2.identity(self.spec))
        self.assertEqual(S ** -1, self.gens['S^-1'])

    def test_conjugacy_search(self):
        A = self.gens['T1'] @ self.gens['S']
        W = self.gens['Tw'] @ self.gens['S']
        B = W.inverse() @ A @ W
        found = conjugacy_search(A, B, 2)
        self.assertIsNotNone(found)
        self.assertEqual(found.inverse() @ A @ found, B)
        self.assertIsNone(conjugacy_search(A, self.gens['T1'], 3))


class ModulusTestCase(SimpleTestCase):

    def test_residue_count(self):
        spec = RingSpec(1)
        for u in (spec(1, 1), spec(2), spec(2, 1), spec(0, 5)):
            self.assertEqual(len(Modulus(u).elements()), u.norm)

    def test_reduce_is_canonical(self):
        spec = RingSpec(3)
        mod = Modulus(spec(2, 1))
        x = spec(5, -4)
        self.assertEqual(mod.reduce(x), mod.reduce(x + spec(2, 1) * spec(-3, 7)))
        self.assertTrue(mod.congruent(x, mod.reduce(x)))


class OrderTestCase(SimpleTestCase):

    def setUp(self):
        self.spec = RingSpec(1)

    def test_known_orders(self):
        expected = {'1+w': 6, '2': 48, '2+w': 120, '5w': 14400}
        for text, order in expected.items():
            self.assertEqual(sl2_order(factor_modulus(self.spec.parse(text))), order, text)

    def test_factorization(self):
        ring = factor_modulus(self.spec(2))
        self.assertEqual([(f.pi, f.e) for f in ring.factors], [(self.spec(1, 1), 2)])
        ring = factor_modulus(self.spec(0, 5))
        self.assertEqual(sorted(f.residue_size for f in ring.factors), [5, 5])

    def test_unit_rejected(self):
        with self.assertRaises(UsageError):
            factor_modulus(self.spec(0, 1))

    def test_formula_matches_bruteforce(self):
        for d in (1, 2, 3):
            spec = RingSpec(d)
            for text in ('2', '3', '1+w', '2+w', 'w'):
                u = spec.parse(text)
                if u.norm < 2 or u.norm > 12:
                    continue
                self.assertEqual(sl2_order(factor_modulus(u)), sl2_order_bruteforce(u), (d, text))


class LevelTestCase(SimpleTestCase):
    """Level built from (t_4, u_4) = (11i, 5i) for D = 5 over Z[i]"""

    def setUp(self):
        self.spec = RingSpec(1)
        self.disc = require_discriminant(self.spec(5))
        w = self.spec.omega
        self.level = make_level(11 * w, 5 * w, self.disc)
        self.witness = Mat2.of(self.spec, 3 * w, 5 * w, 5 * w, 8 * w)

    def test_tau(self):
        self.assertEqual(self.level.tau, self.spec(0, 3))
        self.assertFalse(self.level.degenerate)

    def test_membership(self):
        self.assertEqual(member(self.witness, self.level), Membership.TAU_COSET)
        self.assertEqual(self.witness.trace, self.spec(0, 11))
        self.assertEqual(member(Mat2.identity(self.spec), self.level), Membership.PRINCIPAL)
        S = dict(elementary_generators(self.spec))['S']
        self.assertEqual(member(S, self.level), Membership.NO)

    def test_index(self):
        self.assertEqual(level_index(self.level), 7200)
        self.assertLessEqual(2 * level_index(self.level), self.level.u.norm ** 3)

    def test_rejects_unit_modulus(self):
        with self.assertRaises(UsageError):
            make_level(self.spec(0, 1), self.spec(1), self.disc)

    def test_rejects_non_solution(self):
        with self.assertRaises(UsageError):
            make_level(self.spec(0, 11), self.spec(0, 4), self.disc)

    def test_coset_trace_residue(self):
        self.assertEqual(coset_trace_residue(self.spec(0, 3), self.level.u), Modulus(self.spec(25)).reduce(self.spec(0, 11)))

    def test_torsion_free(self):
        report = torsion_scan(self.level)
        self.assertTrue(report.certified)
        self.assertEqual(report.elliptic_hits, [])
        self.assertEqual(len(report.residues), 2)

    def test_principal_level_of_two_has_torsion_residue(self):
        report = torsion_scan(principal_level(self.spec(1, 1)))
        # u^2 = 2i, so trace 0 is congruent to 2
        self.assertFalse(report.certified)


class TraceCongruenceTestCase(SimpleTestCase):

    def test_random_principal_words(self):
        spec = RingSpec(1)
        rng = np.random.default_rng(7)
        for text in ('1+w', '2', '5w'):
            u = spec.parse(text)
            gens = principal_generators(u)
            for _ in range(40):
                M = random_word(gens, int(rng.integers(1, 13)), rng)
                self.assertEqual(reduce_mat(M, u), reduce_mat(Mat2.identity(spec), u))
                self.assertTrue(trace_congruence_check(M, u))

    def test_outside_subgroup_rejected(self):
        spec = RingSpec(1)
        S = dict(elementary_generators(spec))['S']
        with self.assertRaises(UsageError):
            trace_congruence_check(S, spec(2))


class SystoleCertificateTestCase(SimpleTestCase):

    def setUp(self):
        self.spec = RingSpec(1)
        w = self.spec.omega
        self.level = make_level(11 * w, 5 * w, require_discriminant(self.spec(5)))
        self.witness = Mat2.of(self.spec, 3 * w, 5 * w, 5 * w, 8 * w)

    def test_certificate_at_small_height(self):
        report = systole_certificate(self.level, self.spec(0, 11), 64)
        self.assertEqual(report.verdict, CertVerdict.CERTIFIED)
        self.assertEqual(report.violations, [])
        self.assertAlmostEqual(report.min_ell, math.acosh(61.5), places=9)
        self.assertAlmostEqual(report.bound_ell, math.acosh(61.5), places=9)
        self.assertIn(self.witness, report.witnesses)

    def test_small_heights_are_vacuous(self):
        for height in (1, 20, 40):
            with self.subTest(height=height):
                report = systole_certificate(self.level, self.spec(0, 11), height)
                self.assertEqual(report.verdict, CertVerdict.VACUOUS)
                self.assertEqual(report.loxodromic_checked, 0)
                self.assertIsNone(report.min_ell)

    def test_minimum_does_not_increase_with_height(self):
        minima = []
        for height in (64, 100, 200):
            report = systole_certificate(self.level, self.spec(0, 11), height)
            self.assertEqual(report.verdict, CertVerdict.CERTIFIED)
            minima.append(report.min_ell)
        self.assertEqual(minima, sorted(minima, reverse=True))
        self.assertAlmostEqual(minima[-1], math.acosh(61.5), places=9)

    def test_certificate_at_default_height(self):
        report = systole_certificate(self.level, self.spec(0, 11), 650)
        self.assertEqual(report.verdict, CertVerdict.CERTIFIED)
        self.assertEqual(report.violations, [])
        self.assertAlmostEqual(report.min_ell, math.acosh(61.5), places=9)
        self.assertIn(self.witness, report.witnesses)

    def test_worker_count_does_not_change_result(self):
        serial = systole_certificate(self.level, self.spec(0, 11), 40)
        pooled = systole_certificate(self.level, self.spec(0, 11), 40, workers=2)
        self.assertEqual(serial.members_checked, pooled.members_checked)
        self.assertEqual(serial.witnesses, pooled.witnesses)

    def test_hypotheses(self):
        with self.assertRaises(UsageError):
            systole_certificate(self.level, self.spec(3), 64)
        with self.assertRaises(UsageError):
            systole_certificate(self.level, self.spec(0, 11), 0)
