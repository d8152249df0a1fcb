"""
Exploratory table of average class numbers over discriminants with small
fundamental unit, next to the model Li(x^4) / (c_d x^2).

Both the h values and the set of discriminants are budget-limited, so the
table is qualitative only.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import mpmath
import numpy as np

from arithmetic.exceptions import EmptyScan, InvariantViolation, PellNotFound, UsageError
from arithmetic.pell import SearchStatus, discriminants_up_to, pell_fundamental
from arithmetic.precision import working_dps
from arithmetic.quadforms import class_number_estimate
from arithmetic.ring import RingSpec
from arithmetic.serializers import to_payload
from kissnum.tracing import tracer

logger = logging.getLogger(__name__)

CAVEATS = (
    'h values are bounded-search estimates, not certified class numbers',
    'only discriminants inside the scan norm with a unit found inside the Pell bound are included',
)


def _li_quadrature(u):
    """Integral from 2 to u of dt / log t at the current precision."""
    return mpmath.quad(lambda t: 1 / mpmath.log(t), [2, u])


def log_integral(u):
    """Li(u) = integral from 2 to u of dt / log t, by quadrature and checked against mpmath.li."""
    with mpmath.workdps(max(mpmath.mp.dps, working_dps())):
        u = mpmath.mpf(u)
        if u < 2:
            raise UsageError(f"Li(u) needs u >= 2, got {u}")
        value = _li_quadrature(u)
        reference = mpmath.li(u, offset=True)
        if abs(value - reference) > mpmath.mpf(10) ** -12 * max(1, abs(reference)):
            raise InvariantViolation(f"Li({u}) quadrature {value} disagrees with {reference}")
        return value


def derivative_check(points, tol=1e-8) -> list:
    """(u, Li'(u), 1/log u, ok) at each sample point, Li' taken numerically from the quadrature."""
    rows = []
    with mpmath.workdps(working_dps()):
        for u in points:
            u = mpmath.mpf(u)
            if u <= 2:
                raise UsageError(f"Li'(u) is sampled on u > 2, got {u}")
            slope = mpmath.diff(_li_quadrature, u, h=mpmath.mpf(10) ** -10)
            expected = 1 / mpmath.log(u)
            rows.append((float(u), float(slope), float(expected), bool(abs(slope - expected) <= tol)))
    return rows


@dataclass(frozen=True)
class AverageEntry:
    D: object
    eps_abs: float
    h_estimate: int
    h_status: str


@dataclass
class AverageTable:
    d: int
    x: float
    discriminants_scanned: int
    found: List[AverageEntry]
    empirical_mean: float
    model_value: Optional[float]
    c_d: Optional[float]
    c_d_fitted: bool
    caveats: list = field(default_factory=list)


def fit_c_d(entries: List[AverageEntry]) -> Optional[float]:
    """
    Least-squares fit of mean_h(x_i) = k * Li(x_i^4) / x_i^2 with c_d = 1/k,
    over the running means at each |eps_D| with x_i^4 > 2.
    """
    ordered = sorted(entries, key=lambda e: e.eps_abs)
    features, targets = [], []
    total = 0
    for count, entry in enumerate(ordered, start=1):
        total += entry.h_estimate
        x = entry.eps_abs
        if x ** 4 <= 2:
            continue
        features.append(float(log_integral(x ** 4) / x ** 2))
        targets.append(total / count)
    if not features:
        return None
    solution, *_ = np.linalg.lstsq(np.array(features).reshape(-1, 1), np.array(targets), rcond=None)
    k = float(solution[0])
    if k <= 0:
        return None
    return 1 / k


def model_value(x: float, c_d: Optional[float]) -> Optional[float]:
    if not c_d or x ** 4 <= 2:
        return None
    return float(log_integral(x ** 4) / (c_d * x ** 2))


@tracer.trace_function('reports.sarnak_average')
def sarnak_average(d: int, x: float, scan_norm: int, pell_bound: int, a_bound: int, depth: int,
                   c_d: Optional[float] = None, workers: int = 1) -> AverageTable:
    if x <= 1:
        raise UsageError(f"x must exceed 1, got {x}")
    spec = RingSpec(d)
    candidates = discriminants_up_to(spec, scan_norm)
    logger.info(f"Average scan for d={d}, x={x}: {len(candidates)} discriminants with N(D) <= {scan_norm}")

    found = []
    for disc in candidates:
        try:
            unit = pell_fundamental(disc, pell_bound, workers=workers)
        except PellNotFound:
            continue
        if unit.status != SearchStatus.CERTIFIED_WITHIN_BOUND or unit.eps_abs > x:
            continue
        estimate = class_number_estimate(disc, a_bound, depth, workers=workers)
        found.append(AverageEntry(D=disc.D, eps_abs=float(unit.eps_abs),
                                  h_estimate=estimate.classes_found, h_status=estimate.status.value))

    if not found:
        raise EmptyScan("no discriminants within x at current budgets")

    caveats = list(CAVEATS)
    fitted = c_d is None
    if fitted:
        c_d = fit_c_d(found)
        caveats.append('c_d fitted by least squares on this table')
        if c_d is None:
            caveats.append('c_d could not be fitted (no usable sample points)')
    mean = sum(e.h_estimate for e in found) / len(found)
    return AverageTable(
        d=d, x=x, discriminants_scanned=len(candidates), found=found,
        empirical_mean=mean, model_value=model_value(x, c_d), c_d=c_d,
        c_d_fitted=fitted, caveats=caveats,
    )


@to_payload.register
def _(obj: AverageTable):
    return {
        'd': obj.d,
        'x': obj.x,
        'discriminants_scanned': obj.discriminants_scanned,
        'found': [{'D': to_payload(e.D), 'eps_abs': e.eps_abs, 'h_estimate': e.h_estimate,
                   'h_status': e.h_status} for e in obj.found],
        'empirical_mean': obj.empirical_mean,
        'model_value': obj.model_value,
        'c_d': obj.c_d,
        'c_d_fitted': obj.c_d_fitted,
        'caveats': obj.caveats,
    }
