"""
End-to-end kissing-number lower bound for the manifold attached to (d, D).

Stages: fundamental Pell solution, its powers and m(eps_D), the level
Gamma_tau[u_m] and its index, the form class estimate h(D), then the count
h * |G| / (2(m+1)). Each form's automorph power A_j^(m+1) is checked to lie
in the level, and distinct classes are checked not to be conjugate under
bounded search. A stage that runs out of budget leaves the remaining fields
unset and marks the report partial.
"""

import logging
from dataclasses import dataclass, field, fields
from typing import Optional

import mpmath

from arithmetic import conf
from arithmetic.congruence import (
    CertReport, CongruenceLevel, Membership, conjugacy_search, factor_modulus, level_index, make_level,
    member, sl2_order, systole_certificate,
)
from arithmetic.exceptions import BudgetExhausted, UsageError
from arithmetic.geom import displacement
from arithmetic.pell import (
    FundamentalUnit, in_guaranteed_regime, m_index, pell_fundamental, power_sequence, require_discriminant,
)
from arithmetic.precision import working_dps
from arithmetic.quadforms import ClassNumberEstimate, EstimateStatus, automorph, class_number_estimate
from arithmetic.ring import QuadInt, RingSpec
from arithmetic.serializers import to_payload
from kissnum.tracing import tracer

from .volume import VolumeRecord, orbifold_volume

logger = logging.getLogger(__name__)

UNIFORM_STABILIZER = 6
STABILIZER_ORDERS = (2, 4, 6)
GROWTH_EXPONENT = mpmath.mpf(31) / 27


@dataclass(frozen=True)
class Budgets:
    pell_bound: int
    a_bound: int
    depth: int
    m_cap: int
    # Entry-norm height for the optional systole certificate
    certify_height: Optional[int] = None
    workers: int = 1

    @classmethod
    def from_settings(cls, **overrides):
        values = {
            'pell_bound': conf.get('PELL_NORM_BOUND'),
            'a_bound': conf.get('A_NORM_BOUND'),
            'depth': conf.get('EQUIV_DEPTH'),
            'm_cap': conf.get('M_CAP'),
            'workers': conf.get('WORKERS'),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def validate(self):
        if self.pell_bound < 0:
            raise UsageError("pell_bound must be >= 0")
        if self.a_bound < 1 or self.depth < 1:
            raise UsageError("a_bound and depth must be >= 1")
        if self.m_cap < 2:
            raise UsageError("m_cap must be >= 2")
        if self.certify_height is not None and self.certify_height < 1:
            raise UsageError("certify_height must be >= 1")

    def to_json(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class KissReport:
    d: int
    D: QuadInt
    budgets: Budgets
    status: str = 'partial'
    reason: str = ''
    fundamental: Optional[FundamentalUnit] = None
    m: Optional[int] = None
    t_m: Optional[QuadInt] = None
    u_m: Optional[QuadInt] = None
    level: Optional[CongruenceLevel] = None
    sl2_order: Optional[int] = None
    group_order: Optional[int] = None
    stabilizer_order: Optional[int] = None
    stabilizer_flag: bool = False
    h_estimate: Optional[ClassNumberEstimate] = None
    classes_in_level: Optional[int] = None
    classes_verified: Optional[int] = None
    kiss_lower: Optional[int] = None
    kiss_lower_uniform: Optional[int] = None
    kiss_lower_certified: Optional[int] = None
    floor_taken: bool = False
    conditional: bool = True
    systole: Optional[float] = None
    volume: Optional[VolumeRecord] = None
    manifold_volume: Optional[float] = None
    index_bound_ok: Optional[bool] = None
    empirical_C: Optional[float] = None
    empirical_mu: Optional[float] = None
    diagnostic_exponent: Optional[float] = None
    certificate: Optional[CertReport] = None
    warnings: list = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return self.status == 'complete'

    @property
    def tau(self) -> Optional[QuadInt]:
        return self.level.tau if self.level is not None else None


def orbit_count(classes: int, group_order: int, stabilizer_order: int):
    """(floor(classes * |G| / stabilizer), whether the floor was taken)."""
    numerator = classes * group_order
    return numerator // stabilizer_order, numerator % stabilizer_order != 0


def _verify_classes(report: KissReport, sol_m, depth: int):
    """Count class representatives whose A_j^(m+1) lies in the level and is not conjugate to an earlier one."""
    kept = []
    in_level = 0
    for Q in report.h_estimate.representatives:
        A = automorph(Q, sol_m)
        if member(A, report.level) == Membership.NO:
            logger.error(f"A^(m+1) for {Q} is outside the level ({report.level.u}, {report.level.tau})")
            continue
        in_level += 1
        if any(conjugacy_search(B, A, depth) is not None for B in kept):
            logger.warning(f"A^(m+1) for {Q} is conjugate to an earlier representative; not counted")
            continue
        kept.append(A)
    return in_level, len(kept)


def kiss_lower_bound(d: int, D: QuadInt, budgets: Budgets) -> KissReport:
    budgets.validate()
    spec = RingSpec(d)
    if D.spec != spec:
        raise UsageError(f"D={D} is not an element of O_{d}")
    disc = require_discriminant(D)
    report = KissReport(d=d, D=D, budgets=budgets)

    with tracer.span('kiss.pipeline', {'d': d, 'D': str(D)}):
        try:
            with tracer.span('kiss.pell', {'norm_bound': budgets.pell_bound}):
                unit = pell_fundamental(disc, budgets.pell_bound, workers=budgets.workers)
            report.fundamental = unit
            report.warnings.extend(unit.warnings)

            with tracer.span('kiss.m_index', {'cap': budgets.m_cap}):
                m = m_index(unit, budgets.m_cap)
            with tracer.span('kiss.power_sequence', {'n_max': m}):
                seq = power_sequence(unit, m)
        except BudgetExhausted as e:
            report.reason = str(e)
            logger.warning(f"Kissing report for D={D} is partial: {e}")
            return report

        report.m, report.t_m, report.u_m = m, seq.t(m), seq.u(m)
        report.stabilizer_order = 2 * (m + 1)
        if report.stabilizer_order not in STABILIZER_ORDERS:
            report.stabilizer_flag = True
            report.warnings.append(
                f"m={m} is outside the guaranteed regime m <= 2; stabilizer order {report.stabilizer_order}"
            )

        with tracer.span('kiss.level', {'u': str(report.u_m)}):
            report.level = make_level(report.t_m, report.u_m, disc)
            report.sl2_order = sl2_order(factor_modulus(report.u_m))
            report.group_order = level_index(report.level)
            report.index_bound_ok = 2 * report.group_order <= report.u_m.norm ** 3
            if report.level.degenerate:
                report.warnings.append('degenerate level: tau = 1 mod u')

        with tracer.span('kiss.class_number', {'a_bound': budgets.a_bound, 'depth': budgets.depth}):
            report.h_estimate = class_number_estimate(disc, budgets.a_bound, budgets.depth,
                                                      workers=budgets.workers, unit=unit)
            report.conditional = report.h_estimate.status == EstimateStatus.HEURISTIC_ESTIMATE

        with tracer.span('kiss.verification'):
            report.classes_in_level, report.classes_verified = _verify_classes(
                report, seq.solution(m), budgets.depth)

        counted = report.classes_verified
        report.kiss_lower, report.floor_taken = orbit_count(counted, report.group_order, report.stabilizer_order)
        report.kiss_lower_uniform, _ = orbit_count(counted, report.group_order, UNIFORM_STABILIZER)
        report.kiss_lower_certified, _ = orbit_count(1, report.group_order, report.stabilizer_order)
        if counted < report.h_estimate.classes_found:
            report.warnings.append(
                f"{report.h_estimate.classes_found - counted} classes dropped for lack of a verified representative"
            )
        report.systole = displacement(report.t_m)

        with tracer.span('kiss.volume'):
            report.volume = orbifold_volume(d)
            report.manifold_volume = report.volume.value * report.group_order
            with mpmath.workdps(working_dps()):
                report.empirical_C = float(mpmath.mpf(report.sl2_order) / report.u_m.norm ** 3)
                report.empirical_mu = float(report.u_m.norm / mpmath.cbrt(report.manifold_volume))

        if budgets.certify_height is not None:
            with tracer.span('kiss.systole_certificate', {'height': budgets.certify_height}):
                report.certificate = systole_certificate(report.level, report.t_m, budgets.certify_height,
                                                         workers=budgets.workers)

        report.status = 'complete'
        report.diagnostic_exponent = growth_diagnostic(report)
        tracer.add_metadata('kiss.lower', report.kiss_lower)

    logger.info(
        f"Kissing report for d={d}, D={D}: m={report.m}, |G|={report.group_order}, "
        f"h_est={report.h_estimate.classes_found}, kiss_lower={report.kiss_lower}"
    )
    return report


def growth_diagnostic(report: KissReport) -> float:
    """kiss_lower * log(vol) / vol^(31/27) for a complete report."""
    if not report.complete:
        raise UsageError(f"report for D={report.D} is incomplete: {report.reason or 'not run'}")
    if report.kiss_lower == 0:
        return 0.0
    with mpmath.workdps(working_dps()):
        vol = mpmath.mpf(report.manifold_volume)
        return float(report.kiss_lower * mpmath.log(vol) / vol ** GROWTH_EXPONENT)


@to_payload.register
def _(obj: KissReport):
    fundamental = obj.fundamental
    return {
        'd': obj.d,
        'D': to_payload(obj.D),
        'status': obj.status,
        'reason': obj.reason,
        'budgets': obj.budgets.to_json(),
        'fundamental': to_payload(fundamental) if fundamental else None,
        'm': obj.m,
        'guaranteed_regime': in_guaranteed_regime(obj.m) if obj.m is not None else None,
        't_m': to_payload(obj.t_m) if obj.t_m else None,
        'u_m': to_payload(obj.u_m) if obj.u_m else None,
        'tau': to_payload(obj.tau) if obj.tau else None,
        'sl2_order': obj.sl2_order,
        'group_order': obj.group_order,
        'stabilizer_order': obj.stabilizer_order,
        'stabilizer_uniform': UNIFORM_STABILIZER,
        'stabilizer_flag': obj.stabilizer_flag,
        'h_estimate': to_payload(obj.h_estimate) if obj.h_estimate else None,
        'classes_in_level': obj.classes_in_level,
        'classes_verified': obj.classes_verified,
        'kiss_lower': obj.kiss_lower,
        'kiss_lower_uniform': obj.kiss_lower_uniform,
        'kiss_lower_certified': obj.kiss_lower_certified,
        'floor_taken': obj.floor_taken,
        'conditional_on_h': obj.conditional,
        'systole': obj.systole,
        'orbifold_volume': to_payload(obj.volume) if obj.volume else None,
        'manifold_volume': obj.manifold_volume,
        'index_bound_ok': obj.index_bound_ok,
        'empirical_C': obj.empirical_C,
        'empirical_mu': obj.empirical_mu,
        'diagnostic_exponent': obj.diagnostic_exponent,
        'certificate': to_payload(obj.certificate) if obj.certificate else None,
        'warnings': list(obj.warnings),
    }
