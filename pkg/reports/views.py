import json
import logging

from django.http import JsonResponse
from django.shortcuts import get_object_or_404
from django.views.decorators.csrf import csrf_exempt
from django.views.decorators.http import require_GET, require_POST
from django_ratelimit.decorators import ratelimit

from arithmetic.congruence import factor_modulus, level_index, make_level, sl2_order
from arithmetic.exceptions import KissnumError
from arithmetic.geom import IsometryClass, classify, complex_length, displacement, parse_trace
from arithmetic.pell import require_discriminant
from arithmetic.ring import RingSpec
from arithmetic.serializers import to_payload

from .models import KissRun
from .pipeline import Budgets
from .tasks import compute_kiss_report

logger = logging.getLogger(__name__)


def _error(message, status=400):
    return JsonResponse({'error': message}, status=status)


def _int_param(params, name, default=None):
    value = params.get(name)
    if value in (None, ''):
        return default
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be an integer, got {value!r}")


@require_GET
@ratelimit(key='ip', rate='60/m', block=True)
def length_view(request):
    """Classify a trace and return its complex length"""
    try:
        tr = parse_trace(request.GET.get('trace', ''))
        kind = classify(tr)
        payload = {'trace': request.GET['trace'], 'class': kind.value,
                   'ell': None, 'theta': None, 'displacement': None}
        if kind == IsometryClass.LOXODROMIC:
            length = complex_length(tr)
            payload.update(ell=length.ell, theta=length.theta, displacement=displacement(tr))
    except (KissnumError, KeyError) as e:
        return _error(str(e))
    return JsonResponse(payload)


@require_GET
@ratelimit(key='ip', rate='30/m', block=True)
def level_view(request):
    """Level Gamma_tau[u] for a Pell solution (t, u) of D"""
    params = request.GET
    try:
        spec = RingSpec(_int_param(params, 'd', 1))
        missing = [name for name in ('t', 'u', 'D') if not params.get(name)]
        if missing:
            raise ValueError(f"missing parameters: {', '.join(missing)}")
        disc = require_discriminant(spec.parse(params['D']))
        level = make_level(spec.parse(params['t']), spec.parse(params['u']), disc)
    except ValueError as e:
        return _error(str(e))
    return JsonResponse({
        'level': to_payload(level),
        'index': level_index(level),
        'sl2_order': sl2_order(factor_modulus(level.u)),
    })


@csrf_exempt
@require_POST
@ratelimit(key='ip', rate='10/m', block=True)
def kiss_create(request):
    """Queue a kissing-number report; the body carries d, D and optional budgets"""
    try:
        body = json.loads(request.body or b'{}')
        d = int(body.get('d', 1))
        spec = RingSpec(d)
        D = spec.parse(body['D'])
        require_discriminant(D)
        budgets = Budgets.from_settings(**{key: body.get(key) for key in
                                           ('pell_bound', 'a_bound', 'depth', 'm_cap', 'certify_height')})
        budgets.validate()
    except KeyError:
        return _error('D is required')
    except (ValueError, TypeError) as e:
        return _error(str(e))

    run = KissRun.objects.create(d=d, discriminant=str(D), budgets=budgets.to_json())
    result = compute_kiss_report.delay(run.pk)
    KissRun.objects.filter(pk=run.pk, task_id='').update(task_id=result.id or '')
    run.refresh_from_db()
    logger.info(f"Queued kiss run {run.pk} for d={d}, D={D}")
    return JsonResponse(run.to_json(), status=202)


@require_GET
def kiss_detail(request, run_id):
    run = get_object_or_404(KissRun, pk=run_id)
    return JsonResponse(run.to_json())
