"""
Matrices over O_d, residues modulo u O_d, and the congruence subgroups
Gamma[u] and Gamma_tau[u] = preimage of {Id, tau Id} under reduction mod u.
"""

from __future__ import annotations

import enum
import logging
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import mpmath
from sympy import factorint, isprime
from sympy.core.numbers import igcdex

from .exceptions import InvariantViolation, UsageError
from .geom import IsometryClass, classify, displacement_lhs
from .parallel import run_chunked
from .pell import Discriminant
from .precision import Verdict, at_least, working_dps
from .ring import QuadInt, RingSpec, exact_quotient, kronecker, lattice_ball_raw, primes_above, qi_divides

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Mat2:
    p: QuadInt
    q: QuadInt
    r: QuadInt
    s: QuadInt

    @classmethod
    def of(cls, spec: RingSpec, p, q, r, s) -> Mat2:
        entries = [x if isinstance(x, QuadInt) else spec(x) for x in (p, q, r, s)]
        return cls(*entries)

    @classmethod
    def sl2(cls, spec: RingSpec, p, q, r, s) -> Mat2:
        return cls.of(spec, p, q, r, s).require_sl2()

    @classmethod
    def identity(cls, spec: RingSpec) -> Mat2:
        return cls.of(spec, 1, 0, 0, 1)

    @property
    def spec(self) -> RingSpec:
        return self.p.spec

    @cached_property
    def det(self) -> QuadInt:
        return self.p * self.s - self.q * self.r

    @property
    def trace(self) -> QuadInt:
        return self.p + self.s

    @property
    def entries(self):
        return (self.p, self.q, self.r, self.s)

    @property
    def max_entry_norm(self) -> int:
        return max(x.norm for x in self.entries)

    def require_sl2(self) -> Mat2:
        if self.det != self.spec.one:
            raise UsageError(f"matrix {self} has determinant {self.det}, not 1")
        return self

    def __matmul__(self, other: Mat2) -> Mat2:
        return Mat2(
            self.p * other.p + self.q * other.r,
            self.p * other.q + self.q * other.s,
            self.r * other.p + self.s * other.r,
            self.r * other.q + self.s * other.s,
        )

    def __neg__(self) -> Mat2:
        return Mat2(-self.p, -self.q, -self.r, -self.s)

    def scale(self, c: QuadInt) -> Mat2:
        return Mat2(c * self.p, c * self.q, c * self.r, c * self.s)

    def inverse(self) -> Mat2:
        self.require_sl2()
        return Mat2(self.s, -self.q, -self.r, self.p)

    def __pow__(self, n: int) -> Mat2:
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = Mat2.identity(self.spec)
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def to_json(self):
        return [[self.p.to_json(), self.q.to_json()], [self.r.to_json(), self.s.to_json()]]

    def __str__(self):
        return f"[[{self.p}, {self.q}], [{self.r}, {self.s}]]"


def elementary_generators(spec: RingSpec) -> list:
    """S, T_1, T_w and their inverses, as (name, matrix) pairs."""
    S = Mat2.of(spec, 0, -1, 1, 0)
    T1 = Mat2.of(spec, 1, 1, 0, 1)
    Tw = Mat2.of(spec, 1, spec.omega, 0, 1)
    return [
        ('S', S), ('S^-1', S.inverse()),
        ('T1', T1), ('T1^-1', T1.inverse()),
        ('Tw', Tw), ('Tw^-1', Tw.inverse()),
    ]


def principal_generators(u: QuadInt) -> list:
    """Elements of Gamma[u]: elementary matrices with entries in uO_d and their conjugates."""
    spec = u.spec
    base = []
    for lam in (spec.one, spec.omega):
        base.append(Mat2.of(spec, 1, lam * u, 0, 1))
        base.append(Mat2.of(spec, 1, 0, lam * u, 1))
    gens = list(base)
    for _, g in elementary_generators(spec):
        gens.extend(g.inverse() @ E @ g for E in base)
    gens.extend([M.inverse() for M in gens])
    return gens


def random_word(gens: list, length: int, rng) -> Mat2:
    M = Mat2.identity(gens[0].spec)
    for index in rng.integers(0, len(gens), size=length):
        M = M @ gens[int(index)]
    return M


def conjugacy_search(A: Mat2, B: Mat2, depth: int) -> Optional[Mat2]:
    """Some W with W^-1 A W = B found by breadth-first search over elementary words, else None."""
    if A.trace != B.trace:
        return None
    if A == B:
        return Mat2.identity(A.spec)
    gens = [g for _, g in elementary_generators(A.spec)]
    seen = {A}
    frontier = deque([(A, Mat2.identity(A.spec), 0)])
    while frontier:
        current, W, level = frontier.popleft()
        if level == depth:
            continue
        for g in gens:
            nxt = g.inverse() @ current @ g
            if nxt in seen:
                continue
            Wg = W @ g
            if nxt == B:
                return Wg
            seen.add(nxt)
            frontier.append((nxt, Wg, level + 1))
    return None


@dataclass(frozen=True)
class Modulus:
    """
    Canonical residues modulo uO_d.

    The lattice uO_d has a basis (g, h), (0, m) in {1, w} coordinates with
    g * m = N(u); residues are the points (x, y) with 0 <= x < g, 0 <= y < m.
    """
    u: QuadInt

    def __post_init__(self):
        if self.u.is_zero:
            raise UsageError("modulus must be nonzero")

    @cached_property
    def _basis(self):
        spec = self.u.spec
        a1, b1 = self.u.raw
        a2, b2 = spec.mul_raw(self.u.raw, (0, 1))
        x, y, g = igcdex(a1, a2)
        g, x, y = int(g), int(x), int(y)
        if g == 0:
            raise InvariantViolation(f"degenerate lattice for u={self.u}")
        h = x * b1 + y * b2
        m = abs(self.u.norm // g)
        return g, h % m, m

    @property
    def size(self) -> int:
        return self.u.norm

    def reduce_raw(self, raw):
        g, h, m = self._basis
        x, y = raw
        k = x // g
        x, y = x - k * g, y - k * h
        return (x, y % m)

    def reduce(self, x: QuadInt) -> QuadInt:
        return QuadInt(*self.reduce_raw(x.raw), x.spec)

    def congruent(self, x: QuadInt, y: QuadInt) -> bool:
        return self.reduce_raw((x - y).raw) == (0, 0)

    def elements(self) -> list:
        g, _, m = self._basis
        spec = self.u.spec
        return [spec(x, y) for x in range(g) for y in range(m)]


@dataclass(frozen=True)
class PrimePowerFactor:
    pi: QuadInt
    e: int
    residue_size: int


@dataclass(frozen=True)
class ResidueRing:
    u: QuadInt
    factors: tuple
    unit: QuadInt

    @property
    def size(self) -> int:
        return self.u.norm


def factor_modulus(u: QuadInt) -> ResidueRing:
    if u.is_zero or u.is_unit:
        raise UsageError(f"cannot factor {u}: zero or a unit")
    spec = u.spec
    remaining = u
    factors = []
    for p in sorted(factorint(u.norm)):
        for pi in primes_above(spec, int(p)):
            n_pi = pi.norm
            inert = pi.is_rational and kronecker(spec.field_discriminant, int(p)) == -1
            if not (isprime(n_pi) or inert):
                raise InvariantViolation(f"{pi} is not certified prime in O_{spec.d}")
            e = 0
            while True:
                q = qi_divides(pi, remaining)
                if q is None:
                    break
                remaining = q
                e += 1
            if e:
                factors.append(PrimePowerFactor(pi=pi, e=e, residue_size=n_pi))
    if not remaining.is_unit:
        raise InvariantViolation(f"factorization of {u} left non-unit cofactor {remaining}")
    product = 1
    for f in factors:
        product *= f.residue_size ** (2 * f.e)
    if product != u.norm ** 2:
        raise InvariantViolation(f"factor norms of {u} do not multiply to N(u)^2")
    return ResidueRing(u=u, factors=tuple(factors), unit=remaining)


def sl2_order(R: ResidueRing) -> int:
    """|SL_2(O/uO)| = prod N(P)^(3e-2) (N(P)^2 - 1)."""
    order = 1
    for f in R.factors:
        n = f.residue_size
        order *= n ** (3 * f.e - 2) * (n * n - 1)
    return order


def sl2_order_bruteforce(u: QuadInt) -> int:
    """Count det-1 matrices over O/uO by pairing the distributions of ps and qr."""
    mod = Modulus(u)
    spec = u.spec
    reps = [x.raw for x in mod.elements()]
    products = Counter(mod.reduce_raw(spec.mul_raw(x, y)) for x in reps for y in reps)
    one = mod.reduce_raw((1, 0))
    total = 0
    for value, count in products.items():
        # ps = value, qr = value - 1
        shifted = mod.reduce_raw((value[0] - one[0], value[1] - one[1]))
        total += count * products.get(shifted, 0)
    return total


def reduce_mat(M: Mat2, u) -> Mat2:
    mod = u if isinstance(u, Modulus) else Modulus(u)
    return Mat2(*(mod.reduce(x) for x in M.entries))


class Membership(str, enum.Enum):
    PRINCIPAL = 'Principal'
    TAU_COSET = 'TauCoset'
    NO = 'No'


@dataclass(frozen=True)
class CongruenceLevel:
    u: QuadInt
    tau: QuadInt
    source: Optional[tuple] = None
    beta: Optional[QuadInt] = None

    @cached_property
    def modulus(self) -> Modulus:
        return Modulus(self.u)

    @property
    def degenerate(self) -> bool:
        return self.modulus.congruent(self.tau, self.u.spec.one)

    def cosets(self):
        """(membership kind, diagonal residue) for each coset of Gamma[u] in the level."""
        spec = self.u.spec
        if self.degenerate:
            return [(Membership.PRINCIPAL, self.modulus.reduce(spec.one))]
        return [(Membership.PRINCIPAL, self.modulus.reduce(spec.one)),
                (Membership.TAU_COSET, self.tau)]


def principal_level(u: QuadInt) -> CongruenceLevel:
    if u.is_zero:
        raise UsageError("level modulus must be nonzero")
    return CongruenceLevel(u=u, tau=Modulus(u).reduce(u.spec.one))


def _tau_from(t, u, beta, mod):
    tau1 = exact_quotient(t - beta * u, t.spec(2), 'tau_1 = (t - beta u)/2')
    return mod.reduce(tau1)


def make_level(t: QuadInt, u: QuadInt, disc: Discriminant) -> CongruenceLevel:
    spec = u.spec
    if u.is_zero or u.is_unit:
        raise UsageError(f"u={u} is zero or a unit: the level is trivial")
    if t * t - disc.D * u * u != spec(4):
        raise UsageError(f"({t}, {u}) does not solve the Pell equation for D={disc}")
    mod = Modulus(u)
    beta = disc.witness_x
    tau = _tau_from(t, u, beta, mod)

    if not mod.congruent(2 * tau, t):
        raise InvariantViolation(f"2 tau != t mod {u}")
    if not mod.congruent(tau * tau, spec.one):
        raise InvariantViolation(f"tau^2 != 1 mod {u}")

    for alt in (beta + 2, -beta, beta + 2 * spec.omega):
        if qi_divides(spec(4), disc.D - alt * alt) is None:
            raise InvariantViolation(f"alternative beta={alt} is not a square root of D mod 4")
        if _tau_from(t, u, alt, mod) != tau:
            raise InvariantViolation(f"tau depends on beta: {beta} and {alt} disagree")

    level = CongruenceLevel(u=u, tau=tau, source=(t, u, disc.D), beta=beta)
    if level.degenerate:
        logger.warning(f"Degenerate level: tau = 1 mod {u}; Gamma_tau[u] = Gamma[u]")
    return level


def member(M: Mat2, L: CongruenceLevel) -> Membership:
    red = reduce_mat(M, L.modulus)
    zero = L.u.spec.zero
    if red.q != zero or red.r != zero or red.p != red.s:
        return Membership.NO
    if red.p == L.modulus.reduce(L.u.spec.one):
        return Membership.PRINCIPAL
    if red.p == L.tau:
        return Membership.TAU_COSET
    return Membership.NO


def trace_congruence_check(M: Mat2, u: QuadInt) -> bool:
    """u^2 divides tr(M) - 2 for M in Gamma[u]."""
    if member(M, principal_level(u)) != Membership.PRINCIPAL:
        raise UsageError(f"{M} is not in the principal congruence subgroup of level {u}")
    holds = qi_divides(u * u, M.trace - 2) is not None
    if not holds:
        logger.error(f"tr(M) - 2 not divisible by u^2 for M={M}, u={u}")
    return holds


def level_index(L: CongruenceLevel) -> int:
    order = sl2_order(factor_modulus(L.u))
    if L.degenerate:
        logger.warning(f"tau = 1 mod {L.u}: index equals |SL_2(O/uO)| = {order}")
        return order
    return order // 2


def coset_trace_residue(c: QuadInt, u: QuadInt) -> QuadInt:
    """Trace residue mod u^2 of any matrix reducing to c Id mod u: 3c - c^3."""
    return Modulus(u * u).reduce(3 * c - c * c * c)


class CertVerdict(str, enum.Enum):
    CERTIFIED = 'Certified'
    VACUOUS = 'Vacuous'
    VIOLATED = 'Violated'


@dataclass
class CertReport:
    level: CongruenceLevel
    t: QuadInt
    height: int
    verdict: CertVerdict
    bound_ell: float
    members_checked: int = 0
    loxodromic_checked: int = 0
    violations: list = field(default_factory=list)
    min_ell: Optional[float] = None
    witnesses: list = field(default_factory=list)


def _coset_entries(spec, mod, c_raw, height):
    return [x for x in lattice_ball_raw(spec, height) if mod.reduce_raw((x[0] - c_raw[0], x[1] - c_raw[1])) == (0, 0)]


def _systole_chunk(p_values, d, u_raw, t_raw, c_raw, height):
    """Scan matrices with p in p_values; returns (members, loxodromic, violations, best_lhs, witnesses)."""
    spec = RingSpec(d)
    u = spec(*u_raw)
    t = spec(*t_raw)
    mod = Modulus(u)
    nu = u.norm
    s_values = _coset_entries(spec, mod, c_raw, height)
    multiples = [spec.mul_raw(u_raw, x) for x in lattice_ball_raw(spec, height // nu)]
    small = [x for x in lattice_ball_raw(spec, height // nu) if x != (0, 0)]
    u2 = spec.mul_raw(u_raw, u_raw)

    members = loxodromic = 0
    violations, witnesses = [], []
    best = None
    with mpmath.workdps(working_dps()):
        bound = displacement_lhs(t)
        tol = mpmath.mpf(10) ** (-(working_dps() - 10))
        for p in p_values:
            for s in s_values:
                ps = spec.mul_raw(p, s)
                x = (ps[0] - 1, ps[1])
                pairs = []
                if x == (0, 0):
                    pairs.extend((q, (0, 0)) for q in multiples)
                    pairs.extend(((0, 0), r) for r in multiples if r != (0, 0))
                else:
                    xq = spec.divides_raw(u2, x)
                    if xq is None:
                        continue
                    for q1 in small:
                        r1 = spec.divides_raw(q1, xq)
                        if r1 is None or spec.norm_raw(r1) * nu > height:
                            continue
                        pairs.append((spec.mul_raw(u_raw, q1), spec.mul_raw(u_raw, r1)))
                for q, r in pairs:
                    members += 1
                    tr = spec(p[0] + s[0], p[1] + s[1])
                    if classify(tr) != IsometryClass.LOXODROMIC:
                        continue
                    loxodromic += 1
                    lhs = displacement_lhs(tr)
                    M = (p, q, r, s)
                    if at_least(lhs, bound) != Verdict.PASS:
                        violations.append(M)
                    if best is None or lhs < best - tol:
                        best = lhs
                        witnesses = [M]
                    elif abs(lhs - best) <= tol:
                        witnesses.append(M)
    return members, loxodromic, violations, best, witnesses


def systole_certificate(L: CongruenceLevel, t: QuadInt, height: int, workers: int = 1) -> CertReport:
    """
    Check 4 cosh(ell(M)) >= |t|^2 + |t^2 - 4| for every loxodromic M in Gamma_tau[u]
    with all entry norms <= height.
    """
    if height < 1:
        raise UsageError("height must be >= 1")
    u = L.u
    if not (t.norm > 16 and 81 * t.norm < 16 * u.norm * u.norm):
        raise UsageError(f"hypotheses 4 < |t| < (4/9)|u|^2 fail for t={t}, u={u}")
    spec = u.spec
    logger.info(f"Systole certificate for level ({u}, {L.tau}), t={t}, height {height}")

    members = loxodromic = 0
    violations, witnesses = [], []
    best = None
    with mpmath.workdps(working_dps()):
        bound_ell = float(mpmath.acosh(displacement_lhs(t) / 4))
        tol = mpmath.mpf(10) ** (-(working_dps() - 10))
        for _, c in L.cosets():
            p_values = _coset_entries(spec, L.modulus, c.raw, height)
            chunks = run_chunked(_systole_chunk, p_values, workers,
                                 args=(spec.d, u.raw, t.raw, c.raw, height))
            for m_count, l_count, bad, chunk_best, chunk_witnesses in chunks:
                members += m_count
                loxodromic += l_count
                violations.extend(bad)
                if chunk_best is None:
                    continue
                if best is None or chunk_best < best - tol:
                    best, witnesses = chunk_best, list(chunk_witnesses)
                elif abs(chunk_best - best) <= tol:
                    witnesses.extend(chunk_witnesses)
        min_ell = float(mpmath.acosh(best / 4)) if best is not None else None

    def as_mat(raw):
        return Mat2(*(spec(*x) for x in raw))

    if violations:
        verdict = CertVerdict.VIOLATED
        logger.error(f"{len(violations)} systole violations at level ({u}, {L.tau})")
    elif loxodromic == 0:
        verdict = CertVerdict.VACUOUS
    else:
        verdict = CertVerdict.CERTIFIED
    return CertReport(
        level=L, t=t, height=height, verdict=verdict, bound_ell=bound_ell,
        members_checked=members, loxodromic_checked=loxodromic,
        violations=[as_mat(v) for v in violations], min_ell=min_ell,
        witnesses=sorted((as_mat(w) for w in witnesses),
                         key=lambda M: (M.max_entry_norm, [x.raw for x in M.entries])),
    )


@dataclass
class TorsionReport:
    level: CongruenceLevel
    residues: list
    elliptic_hits: list
    certified: bool


def torsion_scan(L: CongruenceLevel) -> TorsionReport:
    """No trace of the level is a real number in (-2, 2)."""
    spec = L.u.spec
    if L.u.is_unit:
        return TorsionReport(level=L, residues=[], elliptic_hits=[], certified=False)
    square = Modulus(L.u * L.u)
    residues, hits = [], []
    for kind, c in L.cosets():
        rho = coset_trace_residue(c, L.u)
        residues.append((kind, rho))
        for value in (-1, 0, 1):
            if square.congruent(spec(value), rho):
                hits.append((kind, value))
    return TorsionReport(level=L, residues=residues, elliptic_hits=hits, certified=not hits)
