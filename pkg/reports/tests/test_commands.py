import json
import math
from io import StringIO

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from reports.models import KissRun

SMALL = ('--a-bound', '2', '--depth', '2')


def run(*args, out=None):
    out = out if out is not None else StringIO()
    call_command(*args, stdout=out, stderr=StringIO())
    return out.getvalue()


class KissCommandTestCase(SimpleTestCase):

    def test_json(self):
        payload = json.loads(run('kiss', '--D', '5', *SMALL))
        self.assertEqual(payload['status'], 'complete')
        self.assertEqual(payload['m'], 4)
        self.assertEqual(payload['group_order'], 7200)
        self.assertEqual(payload['stabilizer_order'], 10)
        self.assertTrue(payload['stabilizer_flag'])
        self.assertEqual(payload['kiss_lower'], payload['classes_verified'] * 720)
        self.assertAlmostEqual(payload['systole'], math.acosh(61.5), places=9)

    def test_json_is_reproducible(self):
        first = run('kiss', '--D', '5', *SMALL)
        self.assertEqual(first, run('kiss', '--D', '5', *SMALL))

    def test_csv(self):
        lines = run('kiss', '--D', '5', '--out', 'csv', *SMALL).splitlines()
        self.assertEqual(lines[0], 'field,value')
        self.assertEqual(lines[1], 'D,5')
        self.assertIn('m,4', lines)
        self.assertIn('tau,3*w', lines)
        self.assertIn('group_order,7200', lines)

    def test_partial_report_on_budget_exhaustion(self):
        out = StringIO()
        with self.assertRaises(CommandError) as ctx:
            run('kiss', '--D', '5', '--pell-bound', '0', *SMALL, out=out)
        self.assertEqual(ctx.exception.returncode, 3)
        partial = json.loads(out.getvalue())
        self.assertEqual(partial['status'], 'partial')
        self.assertIsNone(partial['kiss_lower'])

    def test_m_cap(self):
        out = StringIO()
        with self.assertRaises(CommandError) as ctx:
            run('kiss', '--D', '5', '--m-cap', '3', *SMALL, out=out)
        self.assertEqual(ctx.exception.returncode, 3)
        self.assertIsNotNone(json.loads(out.getvalue())['fundamental'])

    def test_usage_errors(self):
        for args in (('--D', '2'), ('--D', '5', '--depth', '0'), ('--d', '5', '--D', '5')):
            with self.subTest(args=args), self.assertRaises(CommandError) as ctx:
                run('kiss', *args)
            self.assertEqual(ctx.exception.returncode, 2)


class KissSaveTestCase(TestCase):

    def test_save(self):
        run('kiss', '--D', '5', '--save', *SMALL)
        saved = KissRun.objects.get()
        self.assertEqual(saved.status, 'completed')
        self.assertEqual(saved.discriminant, '5')
        self.assertEqual(saved.report['m'], 4)


class AverageCommandTestCase(SimpleTestCase):

    ARGS = ('average', '--x', '2', '--scan-norm', '25', '--pell-bound', '100') + SMALL

    def test_json(self):
        payload = json.loads(run(*self.ARGS))
        self.assertIn({'a': '5', 'b': '0', 'd': 1}, [entry['D'] for entry in payload['found']])
        self.assertTrue(payload['c_d_fitted'])
        self.assertTrue(payload['caveats'])

    def test_csv(self):
        lines = run(*self.ARGS, '--out', 'csv').splitlines()
        self.assertEqual(lines[0], 'D,eps_abs,h_estimate,h_status')
        self.assertTrue(any(line.startswith('5,1.618') for line in lines[1:]))

    def test_empty_scan(self):
        with self.assertRaises(CommandError) as ctx:
            run('average', '--x', '2', '--scan-norm', '1')
        self.assertEqual(ctx.exception.returncode, 3)

    def test_bad_x(self):
        with self.assertRaises(CommandError) as ctx:
            run('average', '--x', '1', '--scan-norm', '25')
        self.assertEqual(ctx.exception.returncode, 2)
