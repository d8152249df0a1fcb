"""
Covolume of SL_2(O_d) acting on hyperbolic 3-space (Humbert's formula):

    vol = |Delta|^(3/2) zeta(2) L(2, chi_Delta) / (4 pi^2)

Only used for reporting; a configured override replaces the computed value.
"""

import logging
from dataclasses import dataclass

import mpmath

from arithmetic import conf
from arithmetic.exceptions import InvariantViolation
from arithmetic.precision import working_dps
from arithmetic.ring import RingSpec, kronecker
from arithmetic.serializers import to_payload

logger = logging.getLogger(__name__)

FORMULA = '|Delta|^(3/2) * zeta(2) * L(2, chi_Delta) / (4 pi^2)'


@dataclass(frozen=True)
class VolumeRecord:
    d: int
    value: float
    field_discriminant: int
    l_value: float
    l_crosscheck: float
    source: str = 'humbert'
    formula: str = FORMULA


def character(delta: int) -> list:
    """chi_Delta(k) = (Delta/k) for k = 0..|Delta|-1."""
    return [kronecker(delta, k) for k in range(abs(delta))]


def l_series(delta: int):
    """L(2, chi_Delta) as a periodic Dirichlet series."""
    return mpmath.dirichlet(2, character(delta))


def l_series_hurwitz(delta: int):
    """L(2, chi_Delta) = q^-2 sum_a chi(a) zeta(2, a/q)."""
    q = abs(delta)
    chi = character(delta)
    return sum(chi[a] * mpmath.zeta(2, mpmath.mpf(a) / q) for a in range(1, q)) / q ** 2


def orbifold_volume(d: int) -> VolumeRecord:
    spec = RingSpec(d)
    delta = spec.field_discriminant
    with mpmath.workdps(working_dps()):
        l_value = l_series(delta)
        l_check = l_series_hurwitz(delta)
        if abs(l_value - l_check) > mpmath.mpf(10) ** (-(working_dps() // 2)):
            raise InvariantViolation(f"L(2, chi_{delta}) evaluations disagree: {l_value} vs {l_check}")
        value = abs(delta) ** mpmath.mpf(1.5) * mpmath.zeta(2) * l_value / (4 * mpmath.pi ** 2)

    overrides = conf.get('ORBIFOLD_VOLUME_OVERRIDES') or {}
    override = overrides.get(str(d), overrides.get(d))
    if override is not None:
        logger.info(f"Orbifold volume for d={d} overridden by settings: {override}")
        return VolumeRecord(d=d, value=float(override), field_discriminant=delta,
                            l_value=float(l_value), l_crosscheck=float(l_check), source='override')
    return VolumeRecord(d=d, value=float(value), field_discriminant=delta,
                        l_value=float(l_value), l_crosscheck=float(l_check))


@to_payload.register
def _(obj: VolumeRecord):
    return {
        'd': obj.d,
        'value': obj.value,
        'field_discriminant': obj.field_discriminant,
        'l_value': obj.l_value,
        'l_crosscheck': obj.l_crosscheck,
        'source': obj.source,
        'formula': obj.formula,
    }
