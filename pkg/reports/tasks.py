import logging

from celery import shared_task
from django.utils import timezone

from arithmetic.exceptions import KissnumError
from arithmetic.ring import RingSpec
from arithmetic.serializers import to_payload
from kissnum.tracing import tracer

from .models import KissRun
from .pipeline import Budgets, kiss_lower_bound

logger = logging.getLogger(__name__)


@tracer.trace_function('reports.execute_run')
def execute_run(run: KissRun) -> KissRun:
    """Compute the report for a stored run and record the outcome on it."""
    run.status = 'running'
    run.started_at = timezone.now()
    run.save(update_fields=['status', 'started_at', 'updated_at'])
    try:
        spec = RingSpec(run.d)
        report = kiss_lower_bound(run.d, spec.parse(run.discriminant), Budgets(**run.budgets))
        payload = to_payload(report)
    except KissnumError as e:
        logger.error(f"Kiss run {run.pk} failed: {e}")
        run.status = 'failed'
        run.error_message = str(e)
    except Exception as e:
        # Unexpected errors must not leave the run in 'running'
        logger.exception(f"Kiss run {run.pk} crashed")
        run.status = 'failed'
        run.error_message = f"{type(e).__name__}: {e}"
    else:
        run.report = payload
        run.kiss_lower = report.kiss_lower
        run.status = 'completed' if report.complete else 'partial'
        run.error_message = report.reason
    run.completed_at = timezone.now()
    run.save()
    return run


@shared_task(bind=True)
def compute_kiss_report(self, run_id):
    try:
        run = KissRun.objects.get(pk=run_id)
    except KissRun.DoesNotExist:
        logger.warning(f"Kiss run {run_id} no longer exists")
        return None
    if self.request.id and not run.task_id:
        run.task_id = self.request.id
        run.save(update_fields=['task_id', 'updated_at'])
    return execute_run(run).status
