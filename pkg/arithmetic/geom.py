"""
Trace classification and translation lengths of isometries of hyperbolic 3-space.
"""

import enum
import logging
from dataclasses import dataclass

import mpmath

from .exceptions import UsageError
from .precision import PARABOLIC_GUARD, Verdict, at_least, working_dps
from .ring import QuadInt

logger = logging.getLogger(__name__)


class IsometryClass(str, enum.Enum):
    ELLIPTIC = 'Elliptic'
    PARABOLIC = 'Parabolic'
    LOXODROMIC = 'Loxodromic'


@dataclass(frozen=True)
class ComplexLength:
    ell: float
    theta: float
    # cosh((ell + i theta)/2) equals sign * tr/2
    sign: int = 1


def parse_trace(text):
    """Parse the CLI form "re,im"."""
    try:
        re_part, im_part = (part.strip() for part in str(text).split(','))
        return mpmath.mpc(mpmath.mpf(re_part), mpmath.mpf(im_part))
    except (ValueError, TypeError):
        raise UsageError(f"cannot parse trace {text!r}; expected \"re,im\"")


def _as_complex(tr):
    if isinstance(tr, QuadInt):
        return tr.spec.complex_raw(tr.raw)
    return mpmath.mpc(tr)


def classify(tr):
    if isinstance(tr, QuadInt):
        if tr.b == 0 and tr.a in (2, -2):
            return IsometryClass.PARABOLIC
        if tr.b == 0 and -2 < tr.a < 2:
            return IsometryClass.ELLIPTIC
        return IsometryClass.LOXODROMIC

    with mpmath.workdps(working_dps()):
        z = _as_complex(tr)
        if abs(z - 2) <= PARABOLIC_GUARD or abs(z + 2) <= PARABOLIC_GUARD:
            return IsometryClass.PARABOLIC
        if abs(z.imag) <= PARABOLIC_GUARD and -2 < z.real < 2:
            return IsometryClass.ELLIPTIC
        return IsometryClass.LOXODROMIC


def _require_loxodromic(tr):
    kind = classify(tr)
    if kind != IsometryClass.LOXODROMIC:
        raise UsageError(f"trace {tr} is {kind.value}, not loxodromic")


def complex_length(tr) -> ComplexLength:
    """ell + i theta = 2 arccosh(tr/2) with ell >= 0 and theta reduced into (-pi, pi]."""
    _require_loxodromic(tr)
    with mpmath.workdps(working_dps()):
        half = _as_complex(tr) / 2
        z = 2 * mpmath.acosh(half)
        if z.real < 0:
            z = -z
        theta = z.imag
        two_pi = 2 * mpmath.pi
        theta = theta - two_pi * mpmath.floor((theta + mpmath.pi) / two_pi)
        if theta <= -mpmath.pi:
            theta += two_pi
        value = mpmath.cosh(mpmath.mpc(z.real, theta) / 2)
        sign = 1 if abs(value - half) <= abs(value + half) else -1
        return ComplexLength(ell=float(z.real), theta=float(theta), sign=sign)


def displacement_lhs(tr):
    """|tr^2| + |tr^2 - 4|, i.e. 4 cosh of the translation length, at working precision."""
    if isinstance(tr, QuadInt):
        square = tr * tr
        return tr.norm + mpmath.sqrt((square - 4).norm)
    z = _as_complex(tr)
    return abs(z * z) + abs(z * z - 4)


def displacement(tr) -> float:
    _require_loxodromic(tr)
    with mpmath.workdps(working_dps()):
        return float(mpmath.acosh(displacement_lhs(tr) / 4))


def ellipse_gap(tr) -> float:
    """|tr - 2| + |tr + 2| - 4 cosh(ell/2); zero for every loxodromic trace."""
    ell = complex_length(tr).ell
    with mpmath.workdps(working_dps()):
        z = _as_complex(tr)
        return float(abs(z - 2) + abs(z + 2) - 4 * mpmath.cosh(mpmath.mpf(ell) / 2))


def lemma_z_w(z, w) -> bool:
    """|z^2 - 4| >= |w^2 - 4| whenever |z| + |w| >= 8 and |z| >= |w| + 1."""
    with mpmath.workdps(working_dps()):
        z, w = mpmath.mpc(z), mpmath.mpc(w)
        if at_least(abs(z) + abs(w), 8) != Verdict.PASS or at_least(abs(z), abs(w) + 1) != Verdict.PASS:
            raise UsageError(f"lemma_z_w hypotheses unmet for z={z}, w={w}")
        holds = at_least(abs(z * z - 4), abs(w * w - 4)) == Verdict.PASS
    if not holds:
        logger.error(f"|z^2-4| >= |w^2-4| failed for z={z}, w={w}")
    return holds
