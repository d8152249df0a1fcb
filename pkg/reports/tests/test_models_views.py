import json
import math
from unittest import mock

from django.test import TestCase, override_settings
from django.urls import reverse

from reports.models import KissRun
from reports.pipeline import Budgets
from reports.tasks import compute_kiss_report, execute_run

SMALL = Budgets(pell_bound=100, a_bound=2, depth=2, m_cap=8).to_json()


class ExecuteRunTestCase(TestCase):

    def test_completed(self):
        run = execute_run(KissRun.objects.create(d=1, discriminant='5', budgets=SMALL))
        run.refresh_from_db()
        self.assertEqual(run.status, 'completed')
        self.assertEqual(run.report['m'], 4)
        self.assertEqual(run.kiss_lower, run.report['kiss_lower'])
        self.assertIsNotNone(run.started_at)
        self.assertIsNotNone(run.completed_at)

    def test_partial(self):
        budgets = dict(SMALL, pell_bound=0)
        run = execute_run(KissRun.objects.create(d=1, discriminant='5', budgets=budgets))
        self.assertEqual(run.status, 'partial')
        self.assertIsNone(run.kiss_lower)
        self.assertEqual(run.report['status'], 'partial')
        self.assertTrue(run.error_message)

    def test_failed(self):
        run = execute_run(KissRun.objects.create(d=1, discriminant='2', budgets=SMALL))
        self.assertEqual(run.status, 'failed')
        self.assertIn('not a discriminant', run.error_message)
        self.assertIsNone(run.report)

    def test_unexpected_error_marks_failed(self):
        run = KissRun.objects.create(d=1, discriminant='5', budgets=SMALL)
        with mock.patch('reports.tasks.kiss_lower_bound', side_effect=ZeroDivisionError('division by zero')):
            execute_run(run)
        run.refresh_from_db()
        self.assertEqual(run.status, 'failed')
        self.assertIn('ZeroDivisionError', run.error_message)
        self.assertIsNone(run.report)
        self.assertIsNotNone(run.completed_at)

    def test_unknown_budget_key_marks_failed(self):
        run = execute_run(KissRun.objects.create(d=1, discriminant='5', budgets=dict(SMALL, bogus=1)))
        self.assertEqual(run.status, 'failed')
        self.assertIn('TypeError', run.error_message)

    def test_task_for_missing_run(self):
        self.assertIsNone(compute_kiss_report.apply(args=(12345,)).get())

    def test_str(self):
        run = KissRun.objects.create(d=1, discriminant='5', budgets=SMALL)
        self.assertEqual(str(run), 'd=1 D=5 (pending)')


@override_settings(RATELIMIT_ENABLE=False)
class LengthViewTestCase(TestCase):

    def test_loxodromic(self):
        response = self.client.get(reverse('reports:length'), {'trace': '3,0'})
        self.assertEqual(response.status_code, 200)
        payload = response.json()
        self.assertEqual(payload['class'], 'Loxodromic')
        self.assertAlmostEqual(payload['displacement'], math.acosh(3.5), places=9)

    def test_elliptic(self):
        payload = self.client.get(reverse('reports:length'), {'trace': '1,0'}).json()
        self.assertEqual(payload['class'], 'Elliptic')
        self.assertIsNone(payload['ell'])

    def test_bad_trace(self):
        response = self.client.get(reverse('reports:length'), {'trace': 'three'})
        self.assertEqual(response.status_code, 400)
        self.assertIn('error', response.json())


@override_settings(RATELIMIT_ENABLE=False)
class LevelViewTestCase(TestCase):

    def test_level(self):
        response = self.client.get(reverse('reports:level'), {'t': '11*w', 'u': '5*w', 'D': '5'})
        self.assertEqual(response.status_code, 200)
        payload = response.json()
        self.assertEqual(payload['level']['tau'], {'a': '0', 'b': '3', 'd': 1})
        self.assertEqual(payload['index'], 7200)
        self.assertEqual(payload['sl2_order'], 14400)

    def test_missing_parameters(self):
        response = self.client.get(reverse('reports:level'), {'t': '11*w'})
        self.assertEqual(response.status_code, 400)
        self.assertIn('u, D', response.json()['error'])

    def test_not_a_pell_solution(self):
        response = self.client.get(reverse('reports:level'), {'t': '3', 'u': '5*w', 'D': '5'})
        self.assertEqual(response.status_code, 400)

    def test_unsupported_ring(self):
        response = self.client.get(reverse('reports:level'), {'d': '5', 't': '3', 'u': '1', 'D': '5'})
        self.assertEqual(response.status_code, 400)


@override_settings(RATELIMIT_ENABLE=False)
class KissViewTestCase(TestCase):

    def post(self, body):
        return self.client.post(reverse('reports:kiss_create'), data=body, content_type='application/json')

    @mock.patch('reports.views.compute_kiss_report.delay')
    def test_create_queues_task(self, delay):
        delay.return_value = mock.Mock(id='task-1')
        response = self.post(json.dumps({'d': 1, 'D': '5', 'a_bound': 2, 'depth': 2}))
        self.assertEqual(response.status_code, 202)
        run = KissRun.objects.get()
        delay.assert_called_once_with(run.pk)
        self.assertEqual(run.task_id, 'task-1')
        self.assertEqual(run.budgets['a_bound'], 2)
        self.assertEqual(response.json()['status'], 'pending')

    @mock.patch('reports.views.compute_kiss_report.delay')
    def test_rejects_bad_input(self, delay):
        for body in ('{not json', json.dumps({'d': 1}), json.dumps({'D': '2'}),
                     json.dumps({'D': '5', 'depth': 0})):
            with self.subTest(body=body):
                self.assertEqual(self.post(body).status_code, 400)
        delay.assert_not_called()
        self.assertFalse(KissRun.objects.exists())

    def test_get_requires_post(self):
        self.assertEqual(self.client.get(reverse('reports:kiss_create')).status_code, 405)

    def test_detail(self):
        run = KissRun.objects.create(d=1, discriminant='5', budgets=SMALL, status='completed', kiss_lower=720)
        payload = self.client.get(reverse('reports:kiss_detail', args=[run.pk])).json()
        self.assertEqual(payload['id'], run.pk)
        self.assertEqual(payload['kiss_lower'], 720)

    def test_detail_not_found(self):
        self.assertEqual(self.client.get(reverse('reports:kiss_detail', args=[999])).status_code, 404)
