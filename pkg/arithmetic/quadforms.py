"""
Binary quadratic forms a x^2 + b xy + c y^2 over O_d.

SL_2(O_d) acts by the substitution (x, y) -> (px + qy, rx + sy), which is a
right action: act(M1 M2, Q) = act(M2, act(M1, Q)).
"""

from __future__ import annotations

import enum
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from sympy import factorint

from .congruence import Mat2, Modulus, conjugacy_search, elementary_generators
from .exceptions import InvariantViolation, UsageError
from .parallel import run_chunked
from .pell import Discriminant, FundamentalUnit, PellSolution
from .ring import QuadInt, exact_quotient, lattice_ball, nearest_quotient, primes_above, qi_content, qi_divides, qi_sqrt

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadForm:
    a: QuadInt
    b: QuadInt
    c: QuadInt

    @property
    def spec(self):
        return self.a.spec

    @cached_property
    def disc(self) -> QuadInt:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x: QuadInt, y: QuadInt) -> QuadInt:
        return self.a * x * x + self.b * x * y + self.c * y * y

    @cached_property
    def primitive(self) -> bool:
        coeffs = [self.a, self.b, self.c]
        if self.spec.euclidean:
            return qi_content(coeffs).is_unit
        g = 0
        for x in coeffs:
            g = math.gcd(g, x.norm)
        for p in factorint(g):
            for pi in primes_above(self.spec, int(p)):
                if all(qi_divides(pi, x) is not None for x in coeffs):
                    return False
        return True

    def to_json(self):
        return {'a': self.a.to_json(), 'b': self.b.to_json(), 'c': self.c.to_json()}

    def __str__(self):
        return f"({self.a}, {self.b}, {self.c})"


def act(M: Mat2, Q: QuadForm) -> QuadForm:
    M.require_sl2()
    p, q, r, s = M.entries
    b = 2 * Q.a * p * q + Q.b * (p * s + q * r) + 2 * Q.c * r * s
    return QuadForm(Q(p, r), b, Q(q, s))


def automorph(Q: QuadForm, sol: PellSolution) -> Mat2:
    """eps_Q = [[(t - bu)/2, -cu], [au, (t + bu)/2]]."""
    if sol.disc.D != Q.disc:
        raise UsageError(f"Pell solution for D={sol.disc} does not match disc(Q)={Q.disc}")
    t, u = sol.t, sol.u
    two = t.spec(2)
    M = Mat2(
        exact_quotient(t - Q.b * u, two, 'automorph (t - bu)/2'),
        -Q.c * u,
        Q.a * u,
        exact_quotient(t + Q.b * u, two, 'automorph (t + bu)/2'),
    )
    if M.det != t.spec.one:
        raise InvariantViolation(f"automorph of {Q} has determinant {M.det}")
    return M


class EquivOutcome(str, enum.Enum):
    FOUND = 'Found'
    UNKNOWN = 'Unknown'
    NO = 'No'


@dataclass(frozen=True)
class EquivWitness:
    M: Mat2
    source: QuadForm
    target: QuadForm

    def __post_init__(self):
        if act(self.M, self.source) != self.target:
            raise InvariantViolation(f"witness {self.M} does not map {self.source} to {self.target}")


@dataclass(frozen=True)
class EquivResult:
    outcome: EquivOutcome
    witness: Optional[EquivWitness] = None
    # True when only the subgroup generated by S, T_1, T_w was searched
    subgroup_only: bool = False


def orbit_ball(Q: QuadForm, depth: int) -> dict:
    """Forms reachable from Q by words of length <= depth, each with one witness matrix."""
    gens = [g for _, g in elementary_generators(Q.spec)]
    reached = {Q: Mat2.identity(Q.spec)}
    frontier = deque([(Q, 0)])
    while frontier:
        current, level = frontier.popleft()
        if level == depth:
            continue
        M = reached[current]
        for g in gens:
            nxt = act(g, current)
            if nxt not in reached:
                reached[nxt] = M @ g
                frontier.append((nxt, level + 1))
    return reached


def equivalent(Q1: QuadForm, Q2: QuadForm, depth: int) -> EquivResult:
    if depth < 0:
        raise UsageError("depth must be >= 0")
    subgroup_only = not Q1.spec.euclidean
    if Q1.disc != Q2.disc:
        return EquivResult(EquivOutcome.NO, subgroup_only=subgroup_only)
    reached = orbit_ball(Q1, depth)
    if Q2 in reached:
        witness = EquivWitness(M=reached[Q2], source=Q1, target=Q2)
        return EquivResult(EquivOutcome.FOUND, witness, subgroup_only)
    return EquivResult(EquivOutcome.UNKNOWN, subgroup_only=subgroup_only)


def _minimal_representative(b: QuadInt, modulus: QuadInt) -> QuadInt:
    """Norm-minimal element of b + modulus O_d, ties toward the larger (a, b)."""
    k = nearest_quotient(b, modulus)
    spec = b.spec
    candidates = []
    for da in (-1, 0, 1):
        for db in (-1, 0, 1):
            candidates.append(b - (k + spec(da, db)) * modulus)
    return min(candidates, key=lambda x: (x.norm, -x.a, -x.b))


def enumerate_forms(disc: Discriminant, a_norm_bound: int) -> list:
    """Primitive forms of discriminant D with 1 <= N(a) <= a_norm_bound."""
    if a_norm_bound < 1:
        raise UsageError("a_norm_bound must be >= 1")
    if qi_sqrt(disc.D) is not None:
        raise UsageError(f"D={disc} is a perfect square")
    D = disc.D
    forms = []
    for a in lattice_ball(disc.spec, a_norm_bound):
        if a.is_zero:
            continue
        two_a = 2 * a
        four_a = 4 * a
        reps = sorted({_minimal_representative(b0, two_a) for b0 in Modulus(two_a).elements()},
                      key=lambda x: x.sort_key)
        for b in reps:
            c = qi_divides(four_a, b * b - D)
            if c is None:
                continue
            Q = QuadForm(a, b, c)
            if Q.primitive:
                forms.append(Q)
    return forms


class DisjointSet:
    """Union-find over 0..n-1 with path compression and union by rank."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, e):
        root = e
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[e] != root:
            self.parent[e], e = root, self.parent[e]
        return root

    def union(self, x, y):
        x_root, y_root = self.find(x), self.find(y)
        if x_root == y_root:
            return False
        if self.rank[x_root] < self.rank[y_root]:
            x_root, y_root = y_root, x_root
        self.parent[y_root] = x_root
        if self.rank[x_root] == self.rank[y_root]:
            self.rank[x_root] += 1
        return True

    def classes(self):
        """Member lists per class, ordered by smallest member."""
        groups = {}
        for e in range(len(self.parent)):
            groups.setdefault(self.find(e), []).append(e)
        return sorted(groups.values(), key=lambda members: members[0])


class EstimateStatus(str, enum.Enum):
    LOWER_BOUND_CERTIFIED = 'LowerBoundCertified'
    HEURISTIC_ESTIMATE = 'HeuristicEstimate'


@dataclass
class ClassNumberEstimate:
    disc: Discriminant
    classes_found: int
    merged_by_depth: int
    a_norm_bound: int
    equiv_depth: int
    status: EstimateStatus
    representatives: list = field(default_factory=list)
    forms_enumerated: int = 0
    merged_by_conjugacy: int = 0
    subgroup_only: bool = False


def _reach_chunk(indices, forms, depth):
    index_of = {Q: i for i, Q in enumerate(forms)}
    links = []
    for i in indices:
        for Q in orbit_ball(forms[i], depth):
            j = index_of.get(Q)
            if j is not None and j != i:
                links.append((i, j))
    return links


def class_number_estimate(disc: Discriminant, a_norm_bound: int, equiv_depth: int,
                          workers: int = 1, unit: Optional[FundamentalUnit] = None) -> ClassNumberEstimate:
    """
    Partition the enumerated forms into classes found by bounded search.

    With a fundamental unit, classes whose automorphs are found conjugate are
    merged too. The count is an estimate in both directions.
    """
    if a_norm_bound < 1 or equiv_depth < 0:
        raise UsageError("a_norm_bound must be >= 1 and equiv_depth >= 0")
    forms = enumerate_forms(disc, a_norm_bound)
    logger.info(f"Class number estimate for D={disc}: {len(forms)} forms, depth {equiv_depth}")
    ds = DisjointSet(len(forms))
    merged = 0
    for links in run_chunked(_reach_chunk, range(len(forms)), workers, args=(forms, equiv_depth)):
        for i, j in links:
            merged += ds.union(i, j)

    by_conjugacy = 0
    if unit is not None and equiv_depth > 0:
        automorphs = [automorph(Q, unit.sol) for Q in forms]
        roots = [members[0] for members in ds.classes()]
        for x, i in enumerate(roots):
            for j in roots[x + 1:]:
                if ds.find(i) != ds.find(j) and conjugacy_search(automorphs[i], automorphs[j], equiv_depth):
                    by_conjugacy += ds.union(i, j)

    classes = ds.classes()
    status = (EstimateStatus.LOWER_BOUND_CERTIFIED if len(classes) == 1
              else EstimateStatus.HEURISTIC_ESTIMATE)
    return ClassNumberEstimate(
        disc=disc,
        classes_found=len(classes),
        merged_by_depth=merged,
        a_norm_bound=a_norm_bound,
        equiv_depth=equiv_depth,
        status=status,
        representatives=[forms[members[0]] for members in classes],
        forms_enumerated=len(forms),
        merged_by_conjugacy=by_conjugacy,
        subgroup_only=not disc.spec.euclidean,
    )


@dataclass
class CorrespondenceReport:
    pairs_checked: int = 0
    trace_failures: list = field(default_factory=list)
    conjugation_failures: list = field(default_factory=list)
    anomalies: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.trace_failures or self.conjugation_failures or self.anomalies)


def correspondence_check(forms: list, sol: PellSolution, depth: int) -> CorrespondenceReport:
    """
    Equivalent forms have conjugate automorphs: if act(M, Q1) = Q2 then
    eps_Q2 = M^-1 eps_Q1 M. Pairs not found equivalent but whose automorphs
    are found conjugate are reported as anomalies.
    """
    report = CorrespondenceReport()
    if not forms:
        return report
    if any(Q.disc != forms[0].disc for Q in forms):
        raise UsageError("correspondence_check needs forms of a single discriminant")
    automorphs = [automorph(Q, sol) for Q in forms]
    for Q, eps in zip(forms, automorphs):
        if eps.trace != sol.t:
            report.trace_failures.append(Q)
    for i in range(len(forms)):
        for j in range(i + 1, len(forms)):
            report.pairs_checked += 1
            result = equivalent(forms[i], forms[j], depth)
            if result.outcome == EquivOutcome.FOUND:
                M = result.witness.M
                if M.inverse() @ automorphs[i] @ M != automorphs[j]:
                    report.conjugation_failures.append((forms[i], forms[j]))
            elif conjugacy_search(automorphs[i], automorphs[j], depth) is not None:
                report.anomalies.append((forms[i], forms[j]))
    if not report.ok:
        logger.error(f"Correspondence check failed for D={forms[0].disc}: {report}")
    return report
