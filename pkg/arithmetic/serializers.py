"""
JSON payloads and CSV rows for the command-line and HTTP outputs.

Arbitrary-precision integers travel as decimal strings; reals are rounded to
double precision.
"""

import csv
import enum
import io
import json
from functools import singledispatch

import mpmath

from .congruence import CertReport, CongruenceLevel, Mat2, ResidueRing, TorsionReport
from .geom import ComplexLength
from .pell import BoundReport, Discriminant, FundamentalUnit, PellSolution, PowerSeq
from .quadforms import ClassNumberEstimate, CorrespondenceReport, EquivResult, QuadForm
from .ring import QuadInt


@singledispatch
def to_payload(obj):
    if isinstance(obj, enum.Enum):
        return obj.value
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, mpmath.mpf):
        return float(obj)
    if isinstance(obj, dict):
        return {str(k): to_payload(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_payload(x) for x in obj]
    raise TypeError(f"no payload for {type(obj).__name__}")


@to_payload.register
def _(obj: QuadInt):
    return obj.to_json()


@to_payload.register
def _(obj: Mat2):
    return obj.to_json()


@to_payload.register
def _(obj: QuadForm):
    return obj.to_json()


@to_payload.register
def _(obj: Discriminant):
    return {'D': to_payload(obj.D), 'witness_x': to_payload(obj.witness_x),
            'nonsquare_certified': obj.nonsquare_certified, 'norm': obj.norm}


@to_payload.register
def _(obj: PellSolution):
    return {'t': to_payload(obj.t), 'u': to_payload(obj.u), 'eps_abs': float(obj.eps_abs)}


@to_payload.register
def _(obj: FundamentalUnit):
    return {
        't': to_payload(obj.t),
        'u': to_payload(obj.u),
        'D': to_payload(obj.disc.D),
        'eps_abs': float(obj.eps_abs),
        'status': obj.status.value,
        'search_norm_bound': obj.search_norm_bound,
        'globally_minimal': obj.globally_minimal,
        'warnings': list(obj.warnings),
    }


@to_payload.register
def _(obj: PowerSeq):
    return [{'n': n, 't': to_payload(sol.t), 'u': to_payload(sol.u)} for n, sol in obj.entries]


@to_payload.register
def _(obj: BoundReport):
    return {
        'D': to_payload(obj.unit.disc.D),
        'n_max': obj.n_max,
        'ok': obj.ok,
        'rows': [dict(zip(BoundReport.CSV_COLUMNS, row.as_row())) for row in obj.rows],
    }


@to_payload.register
def _(obj: EquivResult):
    return {
        'outcome': obj.outcome.value,
        'witness': to_payload(obj.witness.M) if obj.witness else None,
        'subgroup_only': obj.subgroup_only,
    }


@to_payload.register
def _(obj: ClassNumberEstimate):
    return {
        'D': to_payload(obj.disc.D),
        'classes_found': obj.classes_found,
        'merged_by_depth': obj.merged_by_depth,
        'merged_by_conjugacy': obj.merged_by_conjugacy,
        'forms_enumerated': obj.forms_enumerated,
        'a_norm_bound': obj.a_norm_bound,
        'equiv_depth': obj.equiv_depth,
        'status': obj.status.value,
        'subgroup_only': obj.subgroup_only,
        'representatives': [to_payload(Q) for Q in obj.representatives],
    }


@to_payload.register
def _(obj: CorrespondenceReport):
    return {
        'ok': obj.ok,
        'pairs_checked': obj.pairs_checked,
        'trace_failures': [to_payload(Q) for Q in obj.trace_failures],
        'conjugation_failures': [[to_payload(a), to_payload(b)] for a, b in obj.conjugation_failures],
        'anomalies': [[to_payload(a), to_payload(b)] for a, b in obj.anomalies],
    }


@to_payload.register
def _(obj: ComplexLength):
    return {'ell': obj.ell, 'theta': obj.theta, 'sign': obj.sign}


@to_payload.register
def _(obj: ResidueRing):
    return {
        'u': to_payload(obj.u),
        'size': obj.size,
        'unit': to_payload(obj.unit),
        'factors': [{'pi': to_payload(f.pi), 'e': f.e, 'residue_size': f.residue_size}
                    for f in obj.factors],
    }


@to_payload.register
def _(obj: CongruenceLevel):
    return {
        'u': to_payload(obj.u),
        'tau': to_payload(obj.tau),
        'beta': to_payload(obj.beta),
        'degenerate': obj.degenerate,
    }


@to_payload.register
def _(obj: CertReport):
    return {
        'verdict': obj.verdict.value,
        'height': obj.height,
        't': to_payload(obj.t),
        'level': to_payload(obj.level),
        'bound_ell': obj.bound_ell,
        'members_checked': obj.members_checked,
        'loxodromic_checked': obj.loxodromic_checked,
        'violations': [to_payload(M) for M in obj.violations],
        'min_ell': obj.min_ell,
        'witnesses': [to_payload(M) for M in obj.witnesses],
    }


@to_payload.register
def _(obj: TorsionReport):
    return {
        'certified': obj.certified,
        'residues': [{'coset': kind.value, 'trace_mod_u2': to_payload(rho)} for kind, rho in obj.residues],
        'elliptic_hits': [{'coset': kind.value, 'trace': value} for kind, value in obj.elliptic_hits],
    }


def dumps(payload) -> str:
    return json.dumps(to_payload(payload), indent=2, sort_keys=True)


def csv_text(columns, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    writer.writerows(rows)
    return buffer.getvalue()
