"""
High-precision evaluation helpers and guarded comparisons.

Exact integer comparisons are always preferred; the helpers here are used only
where one side of an inequality is transcendental.
"""

import enum
from contextlib import contextmanager

import mpmath

WORKING_DPS = 50
GUARD_BAND = mpmath.mpf('1e-9')
# Traces this close to +-2 are treated as parabolic.
PARABOLIC_GUARD = mpmath.mpf('1e-12')


class Verdict(str, enum.Enum):
    PASS = 'pass'
    FAIL = 'fail'
    INCONCLUSIVE = 'inconclusive'
    SKIPPED = 'skipped'


def dps_for(*magnitudes):
    """Decimal digits needed to keep the guard band meaningful next to these integers."""
    digits = max((len(str(abs(int(m)))) for m in magnitudes), default=1)
    return WORKING_DPS + digits


@contextmanager
def working_precision(*magnitudes):
    """Raise the precision for these magnitudes; never lowers an enclosing context."""
    with mpmath.workdps(max(mpmath.mp.dps, dps_for(*magnitudes))):
        yield


def strictly_less(lhs, rhs, guard=None):
    """lhs < rhs, inconclusive inside the guard band."""
    guard = GUARD_BAND if guard is None else guard
    gap = mpmath.mpf(rhs) - mpmath.mpf(lhs)
    if gap > guard:
        return Verdict.PASS
    if gap < -guard:
        return Verdict.FAIL
    return Verdict.INCONCLUSIVE


def at_least(lhs, rhs, guard=None):
    """lhs >= rhs up to the guard band (equality attained by witnesses must pass)."""
    guard = GUARD_BAND if guard is None else guard
    if mpmath.mpf(lhs) - mpmath.mpf(rhs) >= -guard:
        return Verdict.PASS
    return Verdict.FAIL


def exact(flag):
    return Verdict.PASS if flag else Verdict.FAIL


def as_float(value):
    return float(mpmath.mpf(value))


def working_dps():
    return WORKING_DPS


def configure(dps=None, guard=None):
    """Apply the WORKING_DPS and GUARD_BAND settings."""
    global WORKING_DPS, GUARD_BAND
    if dps is not None:
        WORKING_DPS = int(dps)
    if guard is not None:
        GUARD_BAND = mpmath.mpf(guard)
