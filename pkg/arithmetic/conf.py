"""Budget defaults, overridable through settings.ARITHMETIC."""

from django.conf import settings

DEFAULTS = {
    'PELL_NORM_BOUND': 100,
    'A_NORM_BOUND': 8,
    'EQUIV_DEPTH': 4,
    'M_CAP': 8,
    'SYSTOLE_HEIGHT': 650,
    'WORKERS': 1,
    'SEED': 0,
    'WORKING_DPS': 50,
    'GUARD_BAND': 1e-9,
    'AVERAGE_SCAN_NORM': 60,
    'ORBIFOLD_VOLUME_OVERRIDES': {},
}


def get(name):
    return getattr(settings, 'ARITHMETIC', {}).get(name, DEFAULTS[name])
