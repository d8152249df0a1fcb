"""
Randomized and exhaustive property suites run by the `verify` command.

Each property counts how many cases it checked and keeps the first few
counterexamples. Sample sizes are multiplied by `scale`.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .congruence import (
    Membership, elementary_generators, make_level, member, principal_generators,
    random_word, reduce_mat, factor_modulus, sl2_order, sl2_order_bruteforce, trace_congruence_check,
)
from .exceptions import BudgetExhausted, UsageError
from .geom import IsometryClass, classify, complex_length, displacement, ellipse_gap, lemma_z_w
from .pell import (
    PellSolution, discriminants_up_to, is_discriminant, m_index, pell_compose,
    pell_fundamental, power_sequence, verify_pell_bounds,
)
from .precision import Verdict
from .quadforms import EquivOutcome, act, automorph, correspondence_check, enumerate_forms, equivalent
from .ring import (
    RingSpec, canonical, lattice_ball, lattice_ball_raw, qi_content, qi_divides, qi_sqrt,
)

logger = logging.getLogger(__name__)

SUITES = ('ring', 'pell', 'forms', 'geom', 'congruence')
MAX_EXAMPLES = 5


@dataclass
class PropertyResult:
    name: str
    checked: int = 0
    failures: int = 0
    examples: list = field(default_factory=list)

    def record(self, ok, example=None):
        self.checked += 1
        if not ok:
            self.failures += 1
            if len(self.examples) < MAX_EXAMPLES:
                self.examples.append(str(example))

    def to_json(self):
        return {'name': self.name, 'checked': self.checked, 'failures': self.failures,
                'examples': self.examples}


@dataclass
class SuiteReport:
    suite: str
    seed: int
    scale: float
    results: list = field(default_factory=list)

    def new(self, name) -> PropertyResult:
        result = PropertyResult(name)
        self.results.append(result)
        return result

    @property
    def ok(self) -> bool:
        return all(r.failures == 0 for r in self.results)

    def to_json(self):
        return {'suite': self.suite, 'seed': self.seed, 'scale': self.scale, 'ok': self.ok,
                'properties': [r.to_json() for r in self.results]}


def _count(n, scale):
    return max(1, int(n * scale))


def _random_element(spec, rng, radius):
    a, b = rng.integers(-radius, radius + 1, size=2)
    return spec(int(a), int(b))


def ring_suite(rng, scale, report):
    mult = report.new('norm_multiplicative')
    for _ in range(_count(1000, scale)):
        spec = RingSpec(int(rng.choice([1, 2, 3, 7, 11, 19, 43, 67, 163])))
        x, y = _random_element(spec, rng, 50), _random_element(spec, rng, 50)
        mult.record((x * y).norm == x.norm * y.norm, (x, y))

    roots = report.new('sqrt_sound')
    for _ in range(_count(200, scale)):
        spec = RingSpec(int(rng.choice([1, 2, 3, 7])))
        z = _random_element(spec, rng, 12)
        if z.norm > 10 ** 4:
            continue
        w = qi_sqrt(z)
        if w is not None:
            roots.record(w * w == z, z)
            continue
        bound = math.isqrt(z.norm) + 1
        roots.record(all(x * x != z for x in lattice_ball(spec, bound)), z)
        w = _random_element(spec, rng, 8)
        roots.record(qi_sqrt(w * w) in (w, -w), w)

    division = report.new('division_sound')
    for _ in range(_count(500, scale)):
        spec = RingSpec(int(rng.choice([1, 2, 3, 7, 11])))
        x = _random_element(spec, rng, 10)
        if x.is_zero:
            continue
        y = x * _random_element(spec, rng, 10) if rng.random() < 0.5 else _random_element(spec, rng, 30)
        q = qi_divides(x, y)
        division.record(q is None or q * x == y, (x, y))

    content = report.new('content_sound')
    for _ in range(_count(300, scale)):
        spec = RingSpec(int(rng.choice([1, 2, 3, 7, 11])))
        common = _random_element(spec, rng, 4)
        xs = [common * _random_element(spec, rng, 6) for _ in range(3)]
        if all(x.is_zero for x in xs):
            continue
        g = qi_content(xs)
        quotients = [qi_divides(g, x) for x in xs]
        ok = all(q is not None for q in quotients) and qi_content(quotients).is_unit
        content.record(ok, xs)

    ball = report.new('ball_monotone_and_complete')
    for d in (1, 2, 3, 7, 163):
        spec = RingSpec(d)
        for bound in range(0, _count(40, scale)):
            small = set(lattice_ball_raw(spec, bound))
            large = set(lattice_ball_raw(spec, bound + 3))
            direct = sum(1 for a in range(-2 * bound - 2, 2 * bound + 3)
                         for b in range(-2 * bound - 2, 2 * bound + 3)
                         if spec.norm_raw((a, b)) <= bound)
            ball.record(small <= large and len(small) == direct, (d, bound))


def _pell_samples(spec, norm_limit, pell_bound, min_norm=0):
    for disc in discriminants_up_to(spec, norm_limit):
        if disc.norm <= min_norm:
            continue
        try:
            yield pell_fundamental(disc, pell_bound)
        except BudgetExhausted:
            continue


def pell_suite(rng, scale, report):
    algebra = report.new('compose_group_laws')
    powers = report.new('power_sequence_matches_composition')
    spec = RingSpec(1)
    units = list(_pell_samples(spec, _count(40, scale), 100))
    for unit in units:
        seq = power_sequence(unit, 8)
        sols = [seq.solution(n) for n in range(4)]
        identity = PellSolution(spec(2), spec(0), unit.disc)
        for _ in range(3):
            a, b, c = (sols[int(i)] for i in rng.integers(0, len(sols), size=3))
            algebra.record(pell_compose(pell_compose(a, b), c) == pell_compose(a, pell_compose(b, c)), unit.disc)
            algebra.record(pell_compose(a, b) == pell_compose(b, a), unit.disc)
        algebra.record(pell_compose(unit.sol, identity) == unit.sol, unit.disc)
        algebra.record(pell_compose(unit.sol, unit.sol.inverse()) == identity, unit.disc)
        composed = unit.sol
        for n in range(1, 9):
            composed = pell_compose(composed, unit.sol)
            powers.record(composed == seq.solution(n), (unit.disc, n))

    growth = report.new('growth_bounds')
    for d in (1, 2, 3):
        for unit in _pell_samples(RingSpec(d), _count(400, scale), _count(10000, scale)):
            bounds = verify_pell_bounds(unit, 6)
            for row in bounds.rows:
                growth.record(row.verdict != Verdict.FAIL, (d, unit.disc, row.lemma, row.n))

    regime = report.new('m_at_most_two_for_large_D')
    limit = _count(3600, scale)
    if limit > 51 * 51:
        for unit in _pell_samples(spec, limit, _count(10000, scale), min_norm=51 * 51):
            try:
                m = m_index(unit, 2)
            except BudgetExhausted:
                m = None
            regime.record(m is not None, unit.disc)


def _sample_forms(spec, D_text, bound=4):
    disc = is_discriminant(spec.parse(D_text))
    return disc, enumerate_forms(disc, bound)


def forms_suite(rng, scale, report):
    spec = RingSpec(1)
    disc, forms = _sample_forms(spec, '5')
    unit = pell_fundamental(disc, 100)
    gens = [g for _, g in elementary_generators(spec)]
    sols = [power_sequence(unit, 3).solution(n) for n in range(4)]

    action = report.new('act_is_right_action')
    invariant = report.new('disc_invariant')
    for _ in range(_count(200, scale)):
        Q = forms[int(rng.integers(0, len(forms)))]
        M1 = random_word(gens, int(rng.integers(1, 6)), rng)
        M2 = random_word(gens, int(rng.integers(1, 6)), rng)
        action.record(act(M1 @ M2, Q) == act(M2, act(M1, Q)), (Q, M1, M2))
        invariant.record(act(M1, Q).disc == Q.disc, (Q, M1))

    hom = report.new('automorph_homomorphism')
    fixes = report.new('automorph_fixes_form')
    for Q in forms:
        for s1 in sols:
            fixes.record(act(automorph(Q, s1), Q) == Q, (Q, s1.t))
            for s2 in sols:
                hom.record(automorph(Q, pell_compose(s1, s2)) == automorph(Q, s1) @ automorph(Q, s2), Q)

    equiv = report.new('equivalence_witnesses')
    for _ in range(_count(50, scale)):
        Q = forms[int(rng.integers(0, len(forms)))]
        Q2 = act(random_word(gens, 2, rng), Q)
        forward = equivalent(Q, Q2, 2)
        back = equivalent(Q2, Q, 2)
        equiv.record(forward.outcome == EquivOutcome.FOUND and back.outcome == EquivOutcome.FOUND, Q)
        equiv.record(equivalent(Q, Q, 0).outcome == EquivOutcome.FOUND, Q)

    corr = report.new('correspondence')
    sample = forms[:3] + [act(random_word(gens, 2, rng), forms[0])]
    corr.record(correspondence_check(sample, unit.sol, 2).ok, sample)


def geom_suite(rng, scale, report):
    consistency = report.new('displacement_matches_complex_length')
    ellipse = report.new('ellipse_identity')
    symmetry = report.new('displacement_symmetries')
    for _ in range(_count(10000, scale)):
        tr = complex(*rng.uniform(-70, 70, size=2))
        if abs(tr) > 100 or classify(tr) != IsometryClass.LOXODROMIC:
            continue
        consistency.record(abs(displacement(tr) - complex_length(tr).ell) <= 1e-9, tr)
        ellipse.record(abs(ellipse_gap(tr)) <= 1e-9, tr)
        values = [displacement(tr), displacement(-tr), displacement(tr.conjugate())]
        symmetry.record(max(values) - min(values) <= 1e-12, tr)

    squaring = report.new('square_doubles_length')
    for _ in range(_count(1000, scale)):
        p, q, r = (complex(*rng.uniform(-3, 3, size=2)) for _ in range(3))
        if abs(p) < 1e-3:
            continue
        s = (1 + q * r) / p
        tr = p + s
        if classify(tr) != IsometryClass.LOXODROMIC or classify(tr * tr - 2) != IsometryClass.LOXODROMIC:
            continue
        squaring.record(abs(complex_length(tr * tr - 2).ell - 2 * complex_length(tr).ell) <= 1e-9, tr)

    lemma = report.new('lemma_z_w')
    for _ in range(_count(100000, scale)):
        w = complex(*rng.uniform(-20, 20, size=2))
        growth = rng.uniform(1, 20)
        z_abs = max(abs(w) + growth, 8 - abs(w))
        angle = rng.uniform(0, 2 * math.pi)
        z = complex(z_abs * math.cos(angle), z_abs * math.sin(angle))
        try:
            lemma.record(lemma_z_w(z, w), (z, w))
        except UsageError:
            continue


def congruence_suite(rng, scale, report):
    spec = RingSpec(1)
    gens = [g for _, g in elementary_generators(spec)]

    hom = report.new('reduction_homomorphism')
    for _ in range(_count(1000, scale)):
        u = _random_element(spec, rng, 4)
        if u.norm < 2:
            continue
        M = random_word(gens, int(rng.integers(1, 8)), rng)
        N = random_word(gens, int(rng.integers(1, 8)), rng)
        hom.record(reduce_mat(M @ N, u) == reduce_mat(reduce_mat(M, u) @ reduce_mat(N, u), u), (M, N, u))

    order = report.new('sl2_order_matches_bruteforce')
    for d in (1, 2, 3):
        ring = RingSpec(d)
        seen = set()
        for u in lattice_ball(ring, 25):
            if u.norm < 2:
                continue
            u = canonical(u)
            if u in seen:
                continue
            seen.add(u)
            order.record(sl2_order(factor_modulus(u)) == sl2_order_bruteforce(u), (d, u))

    lemma = report.new('trace_congruence')
    for text in ('1+w', '2', '5w'):
        u = spec.parse(text)
        principal = principal_generators(u)
        for _ in range(_count(500, scale)):
            M = random_word(principal, int(rng.integers(1, 13)), rng)
            lemma.record(trace_congruence_check(M, u), (u, M))

    disc = is_discriminant(spec(5))
    unit = pell_fundamental(disc, 100)
    m = m_index(unit, 8)
    seq = power_sequence(unit, m)
    level = make_level(seq.t(m), seq.u(m), disc)
    Q = enumerate_forms(disc, 1)[0]
    A = automorph(Q, unit.sol) ** (m + 1)

    power = report.new('automorph_power_in_tau_coset')
    power.record(member(A, level) == Membership.TAU_COSET, A)

    closure = report.new('level_closed')
    pool = principal_generators(level.u) + [A, A.inverse()]
    for _ in range(_count(200, scale)):
        X = random_word(pool, int(rng.integers(1, 6)), rng)
        Y = random_word(pool, int(rng.integers(1, 6)), rng)
        kinds = (member(X, level), member(Y, level))
        product = member(X @ Y, level)
        expected = Membership.PRINCIPAL if kinds[0] == kinds[1] else Membership.TAU_COSET
        closure.record(Membership.NO not in kinds and product == expected
                       and member(X.inverse(), level) == kinds[0], (X, Y))


RUNNERS = {
    'ring': ring_suite,
    'pell': pell_suite,
    'forms': forms_suite,
    'geom': geom_suite,
    'congruence': congruence_suite,
}


def run_suite(name, seed=0, scale=1.0) -> SuiteReport:
    if name not in RUNNERS:
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    rng = np.random.default_rng(seed)
    report = SuiteReport(suite=name, seed=seed, scale=scale)
    logger.info(f"Running property suite {name} (seed={seed}, scale={scale})")
    RUNNERS[name](rng, scale, report)
    for result in report.results:
        if result.failures:
            logger.error(f"Property {name}.{result.name} failed {result.failures}/{result.checked}")
    return report
