"""
Pell-type equations t^2 - D u^2 = 4 over O_d.

Solutions (t, u) correspond to units eps = (t + u sqrt(D))/2 of the relative
quadratic extension; the branch of sqrt(D) is fixed to arg in [0, pi).
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import mpmath

from .exceptions import CapExceeded, InvariantViolation, PellNotFound, UsageError
from .parallel import run_chunked
from . import precision
from .precision import Verdict, dps_for, exact, strictly_less, working_dps, working_precision
from .ring import QuadInt, RingSpec, exact_quotient, lattice_ball, lattice_ball_raw, qi_divides, qi_sqrt

logger = logging.getLogger(__name__)

# |D| > 51 is the regime where m(eps_D) <= 2 is guaranteed.
LARGE_D_NORM = 51 * 51
SMALL_D_NORM = 16
_TIE = mpmath.mpf('1e-30')


@dataclass(frozen=True)
class Discriminant:
    D: QuadInt
    witness_x: QuadInt
    nonsquare_certified: bool = True

    @property
    def spec(self) -> RingSpec:
        return self.D.spec

    @property
    def norm(self) -> int:
        return self.D.norm

    @property
    def abs_value(self):
        return mpmath.sqrt(self.D.norm)

    def sqrt(self):
        """sqrt(D) on the branch with argument in [0, pi)."""
        root = mpmath.sqrt(self.D.to_complex())
        if root.imag < 0 or (root.imag == 0 and root.real < 0):
            root = -root
        return root

    def __str__(self):
        return str(self.D)


def residues_mod_two(spec: RingSpec) -> list:
    return [spec(0), spec(1), spec(0, 1), spec(1, 1)]


def is_discriminant(D: QuadInt) -> Optional[Discriminant]:
    spec = D.spec
    four = spec(4)
    witness = None
    for x in residues_mod_two(spec):
        if qi_divides(four, D - x * x) is not None:
            witness = x
            break
    if witness is None:
        return None
    if qi_sqrt(D) is not None:
        return None
    return Discriminant(D=D, witness_x=witness)


def require_discriminant(D: QuadInt) -> Discriminant:
    disc = is_discriminant(D)
    if disc is None:
        raise UsageError(f"{D} is not a discriminant in O_{D.spec.d} (square mod 4 and non-square required)")
    return disc


def discriminants_up_to(spec: RingSpec, norm_bound: int) -> List[Discriminant]:
    found = []
    for D in lattice_ball(spec, norm_bound):
        disc = is_discriminant(D)
        if disc is not None:
            found.append(disc)
    return found


@dataclass(frozen=True)
class PellSolution:
    t: QuadInt
    u: QuadInt
    disc: Discriminant
    eps_abs: object = field(default=None, compare=False)

    def __post_init__(self):
        if self.t * self.t - self.disc.D * self.u * self.u != self.t.spec(4):
            raise InvariantViolation(
                f"({self.t}, {self.u}) does not solve t^2 - D u^2 = 4 for D={self.disc}"
            )
        if self.eps_abs is None:
            object.__setattr__(self, 'eps_abs', self.abs_eps())

    def eps(self):
        with working_precision(self.t.norm, self.u.norm, self.disc.norm):
            return (self.t.to_complex() + self.u.to_complex() * self.disc.sqrt()) / 2

    def abs_eps(self):
        """|eps| as an mpf at the working precision of this solution (or the enclosing one if higher)."""
        with working_precision(self.t.norm, self.u.norm, self.disc.norm):
            return abs(self.eps())

    @property
    def tie_key(self):
        return (self.t.a, self.t.b, self.u.a, self.u.b)

    def inverse(self) -> PellSolution:
        return PellSolution(self.t, -self.u, self.disc)


class SearchStatus(str, enum.Enum):
    CERTIFIED_WITHIN_BOUND = 'CertifiedWithinBound'
    UNKNOWN = 'Unknown'


@dataclass(frozen=True)
class FundamentalUnit:
    sol: PellSolution
    search_norm_bound: int
    status: SearchStatus
    searched_norm: int = 0
    cover_norm: Optional[int] = None
    warnings: tuple = ()

    @property
    def t(self) -> QuadInt:
        return self.sol.t

    @property
    def u(self) -> QuadInt:
        return self.sol.u

    @property
    def disc(self) -> Discriminant:
        return self.sol.disc

    @property
    def eps_abs(self):
        return self.sol.eps_abs

    @property
    def globally_minimal(self) -> bool:
        """Every smaller |eps'| > 1 would have N(u') <= cover_norm, which was searched."""
        return self.cover_norm is not None and self.cover_norm <= self.searched_norm

    @classmethod
    def from_solution(cls, sol: PellSolution) -> FundamentalUnit:
        """A user-supplied solution taken as the base unit without search."""
        return cls(sol=sol, search_norm_bound=0, status=SearchStatus.UNKNOWN,
                   warnings=_small_d_warnings(sol.disc))


def _small_d_warnings(disc: Discriminant) -> tuple:
    if disc.norm <= SMALL_D_NORM:
        return (f"|D| <= 4: the powers +-eps^(+-n) need not produce every solution for D={disc}",)
    return ()


def _scan_chunk(points, d, D_raw):
    """Solutions (t, u) with u in points, as raw coordinates."""
    spec = RingSpec(d)
    D = spec(*D_raw)
    four = spec(4)
    found = []
    for raw in points:
        u = spec(*raw)
        w = qi_sqrt(four + D * u * u)
        if w is None:
            continue
        found.append((w.raw, raw))
        if not w.is_zero:
            found.append(((-w).raw, raw))
    return found


def _cover_norm(disc: Discriminant, eps_abs) -> int:
    # |eps'| < |eps| forces |t'| < |eps| + 1 and |D||u'|^2 <= (|eps| + 1)^2 + 4
    with working_precision(disc.norm):
        return int(mpmath.floor(((eps_abs + 1) ** 2 + 4) / disc.abs_value))


def _pick_minimal(candidates: List[PellSolution]) -> Optional[PellSolution]:
    if not candidates:
        return None
    with mpmath.workdps(working_dps()):
        smallest = min(c.eps_abs for c in candidates)
        tied = [c for c in candidates if c.eps_abs - smallest < _TIE]
    return max(tied, key=lambda c: c.tie_key)


def pell_fundamental(disc: Discriminant, norm_bound: int, workers: int = 1,
                     batch_size: int = 512) -> FundamentalUnit:
    """
    Exhaustive search of the norm ball for the solution with minimal |eps| > 1.

    The scan proceeds in batches of increasing N(u) and stops once the
    covering bound for the current best solution has been passed; no point
    beyond that bound can hold a smaller |eps|.
    """
    if norm_bound < 1:
        raise PellNotFound(f"empty search region (norm bound {norm_bound}) for D={disc}")
    spec = disc.spec
    points = [p for p in lattice_ball_raw(spec, norm_bound) if p != (0, 0)]
    logger.info(f"Pell search for D={disc} over {len(points)} u with N(u) <= {norm_bound}")

    best = None
    cover = None
    searched = norm_bound
    step = batch_size * max(1, workers)
    for start in range(0, len(points), step):
        batch = points[start:start + step]
        if cover is not None and spec.norm_raw(batch[0]) > cover:
            searched = cover
            break
        for chunk in run_chunked(_scan_chunk, batch, workers, args=(spec.d, disc.D.raw)):
            for t_raw, u_raw in chunk:
                sol = PellSolution(spec(*t_raw), spec(*u_raw), disc)
                if sol.eps_abs > 1 + precision.GUARD_BAND:
                    best = _pick_minimal([s for s in (best, sol) if s is not None])
        if best is not None:
            cover = _cover_norm(disc, best.eps_abs)

    if best is None:
        logger.warning(f"No Pell solution with |eps| > 1 for D={disc} within N(u) <= {norm_bound}")
        raise PellNotFound(f"no solution with |eps| > 1 for D={disc} within N(u) <= {norm_bound}")

    unit = FundamentalUnit(
        sol=best,
        search_norm_bound=norm_bound,
        status=SearchStatus.CERTIFIED_WITHIN_BOUND,
        searched_norm=searched,
        cover_norm=cover,
        warnings=_small_d_warnings(disc),
    )
    logger.info(
        f"Fundamental solution for D={disc}: t={best.t}, u={best.u}, "
        f"|eps|={mpmath.nstr(best.eps_abs, 12)}, globally_minimal={unit.globally_minimal}"
    )
    return unit


def pell_compose(s1: PellSolution, s2: PellSolution) -> PellSolution:
    if s1.disc.D != s2.disc.D:
        raise UsageError(f"cannot compose solutions for D={s1.disc} and D={s2.disc}")
    two = s1.t.spec(2)
    D = s1.disc.D
    t = exact_quotient(s1.t * s2.t + D * s1.u * s2.u, two, 'pell_compose t')
    u = exact_quotient(s1.t * s2.u + s2.t * s1.u, two, 'pell_compose u')
    return PellSolution(t, u, s1.disc)


@dataclass(frozen=True)
class PowerSeq:
    base: FundamentalUnit
    entries: tuple

    def t(self, n: int) -> QuadInt:
        return self.entries[n][1].t

    def u(self, n: int) -> QuadInt:
        return self.entries[n][1].u

    def solution(self, n: int) -> PellSolution:
        return self.entries[n][1]

    @property
    def n_max(self) -> int:
        return len(self.entries) - 1


def power_sequence(f: FundamentalUnit, n_max: int) -> PowerSeq:
    """(t_n, u_n) with eps^(n+1) = (t_n + u_n sqrt(D))/2 for n = 0..n_max."""
    if n_max < 0:
        raise UsageError("n_max must be >= 0")
    spec = f.t.spec
    t0 = f.t
    prev_t, prev_u = spec(2), spec(0)
    cur_t, cur_u = f.t, f.u
    entries = [(0, f.sol)]
    for n in range(1, n_max + 1):
        prev_t, prev_u, cur_t, cur_u = cur_t, cur_u, t0 * cur_t - prev_t, t0 * cur_u - prev_u
        entries.append((n, PellSolution(cur_t, cur_u, f.disc)))

    if n_max >= 1 and entries[1][1].u != f.u * t0:
        raise InvariantViolation(f"u_1 != u_0 t_0 for D={f.disc}")
    if n_max >= 2:
        u2 = exact_quotient(f.u * entries[1][1].t + entries[1][1].u * t0, spec(2), 'closed form u_2')
        if entries[2][1].u != u2:
            raise InvariantViolation(f"u_2 != (u_0 t_1 + u_1 t_0)/2 for D={f.disc}")
    return PowerSeq(base=f, entries=tuple(entries))


def below_threshold(t: QuadInt, u: QuadInt) -> bool:
    """|t| < (4/9)|u|^2, decided on norms."""
    return 81 * t.norm < 16 * u.norm * u.norm


def m_index(f: FundamentalUnit, cap: int) -> int:
    if cap < 2:
        raise UsageError("cap must be >= 2")
    seq = power_sequence(f, cap)
    for n, sol in seq.entries:
        if below_threshold(sol.t, sol.u):
            return n
    raise CapExceeded(f"m(eps_D) > {cap} for D={f.disc}")


def in_guaranteed_regime(m: int) -> bool:
    return m <= 2


@dataclass(frozen=True)
class BoundCheck:
    lemma: str
    n: int
    lhs: str
    rhs: str
    verdict: Verdict

    def as_row(self):
        return [self.lemma, self.n, self.lhs, self.rhs, self.verdict.value]


@dataclass
class BoundReport:
    unit: FundamentalUnit
    n_max: int
    rows: list = field(default_factory=list)

    CSV_COLUMNS = ('lemma', 'n', 'lhs', 'rhs', 'verdict')

    def add(self, lemma, n, lhs, rhs, verdict):
        row = BoundCheck(lemma, n, _fmt(lhs), _fmt(rhs), verdict)
        if verdict == Verdict.FAIL:
            logger.error(f"Bound {lemma} failed at n={n} for D={self.unit.disc}: {row.lhs} vs {row.rhs}")
        self.rows.append(row)

    @property
    def failures(self):
        return [r for r in self.rows if r.verdict == Verdict.FAIL]

    @property
    def ok(self) -> bool:
        return not self.failures

    def verdict(self, lemma, n):
        for row in self.rows:
            if row.lemma == lemma and row.n == n:
                return row.verdict
        return None


def _fmt(value):
    if isinstance(value, int):
        return str(value)
    return mpmath.nstr(mpmath.mpf(value), 15)


def verify_pell_bounds(f: FundamentalUnit, n_max: int) -> BoundReport:
    """Evaluate the Pell inequalities for n = 0..n_max, each only under its hypotheses."""
    report = BoundReport(unit=f, n_max=n_max)
    seq = power_sequence(f, max(n_max, 2))
    ND = f.disc.norm

    for n in range(n_max + 1):
        t, u = seq.t(n), seq.u(n)
        Nt, Nu = t.norm, u.norm
        with working_precision(Nt, Nu, ND):
            absD = mpmath.sqrt(ND)
            report.add('u_upper', n, Nu * absD, Nt + 4, exact(Nu * Nu * ND <= (Nt + 4) ** 2))
            if Nt <= 4:
                report.add('u_lower', n, Nu * absD, Nt - 4, Verdict.PASS)
            else:
                report.add('u_lower', n, Nu * absD, Nt - 4, exact(Nu * Nu * ND >= (Nt - 4) ** 2))
            if not u.is_zero:
                report.add('t_lower', n, Nt + 4, absD, exact(ND <= (Nt + 4) ** 2))
            if not u.is_zero and not below_threshold(t, u) and 243 * ND >= 256:
                report.add('t_upper', n, 2 * mpmath.sqrt(Nt), 9 * absD, exact(4 * Nt <= 81 * ND))

        with mpmath.workdps(dps_for(Nt, ND) + 4 * (n + 1)):
            # |eps| recomputed here so its error stays below the guard band after the power
            power = f.sol.abs_eps() ** (2 * (n + 1))
            report.add('growth_lower', n, Nt - 3, power, strictly_less(Nt - 3, power))
            report.add('growth_upper', n, power, Nt + 3, strictly_less(power, Nt + 3))

    m_small = next((n for n in range(3) if below_threshold(seq.t(n), seq.u(n))), None)
    large = ND > LARGE_D_NORM
    if large:
        report.add('m_regime', -1 if m_small is None else m_small, ND, LARGE_D_NORM,
                   exact(m_small is not None))
    if large and m_small in (1, 2):
        um = seq.u(m_small)
        with working_precision(um.norm, ND):
            report.add('u_m_bound', m_small, mpmath.sqrt(um.norm),
                       30 * mpmath.sqrt(ND) ** mpmath.mpf(1.5),
                       exact(um.norm ** 2 <= 810000 * ND ** 3))
    return report
