"""
Exact arithmetic in the ring of integers O_d of Q(sqrt(-d)), d of class number one.

Elements are stored as integer coordinates over the integral basis {1, w}, where
w = sqrt(-d) for d = 1, 2 (mod 4) and w = (1 + sqrt(-d))/2 for d = 3 (mod 4).
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional

import mpmath
from sympy import isprime, jacobi_symbol, sqrt_mod

from .exceptions import InvariantViolation, UnsupportedError, UsageError
from .precision import working_precision

logger = logging.getLogger(__name__)

CLASS_NUMBER_ONE = (1, 2, 3, 7, 11, 19, 43, 67, 163)
EUCLIDEAN = frozenset({1, 2, 3, 7, 11})

_TERM = re.compile(r'([+-])?(?:(\d+)\*?(w)|(\d+)|(w))')


@dataclass(frozen=True)
class RingSpec:
    d: int

    def __post_init__(self):
        if self.d not in CLASS_NUMBER_ONE:
            raise UsageError(
                f"d={self.d} is not a class-number-one value {CLASS_NUMBER_ONE}"
            )

    @property
    def half_integral(self) -> bool:
        return self.d % 4 == 3

    @property
    def omega_rule(self) -> str:
        return '(1+sqrt(-d))/2' if self.half_integral else 'sqrt(-d)'

    @property
    def euclidean(self) -> bool:
        return self.d in EUCLIDEAN

    @property
    def field_discriminant(self) -> int:
        return -self.d if self.half_integral else -4 * self.d

    @cached_property
    def _k(self) -> int:
        # w^2 = w - k when d = 3 (mod 4)
        return (1 + self.d) // 4

    def __call__(self, a: int, b: int = 0) -> QuadInt:
        return QuadInt(int(a), int(b), self)

    @property
    def zero(self) -> QuadInt:
        return self(0)

    @property
    def one(self) -> QuadInt:
        return self(1)

    @property
    def omega(self) -> QuadInt:
        return self(0, 1)

    @cached_property
    def units(self) -> tuple:
        return tuple(x for x in lattice_ball(self, 1) if x.norm == 1)

    # Raw coordinate arithmetic, used directly by the enumeration hot loops.

    def mul_raw(self, x, y):
        a1, b1 = x
        a2, b2 = y
        if self.half_integral:
            bb = b1 * b2
            return (a1 * a2 - self._k * bb, a1 * b2 + a2 * b1 + bb)
        return (a1 * a2 - self.d * b1 * b2, a1 * b2 + a2 * b1)

    def norm_raw(self, x) -> int:
        a, b = x
        if self.half_integral:
            return a * a + a * b + self._k * b * b
        return a * a + self.d * b * b

    def conj_raw(self, x):
        a, b = x
        if self.half_integral:
            return (a + b, -b)
        return (a, -b)

    def divides_raw(self, x, y):
        """Quotient y/x as raw coordinates, or None when it is not integral."""
        n = self.norm_raw(x)
        qa, qb = self.mul_raw(y, self.conj_raw(x))
        if qa % n or qb % n:
            return None
        return (qa // n, qb // n)

    def complex_raw(self, x):
        a, b = x
        root = mpmath.sqrt(self.d)
        if self.half_integral:
            return mpmath.mpc(a + mpmath.mpf(b) / 2, b * root / 2)
        return mpmath.mpc(a, b * root)

    def coordinates(self, z):
        """Real coordinates (a, b) of a complex number over the basis {1, w}."""
        z = mpmath.mpmathify(z)
        root = mpmath.sqrt(self.d)
        if self.half_integral:
            b = 2 * z.imag / root
            return z.real - b / 2, b
        return z.real, z.imag / root

    def nearby(self, z) -> list:
        """The (at most four) lattice points obtained by rounding each coordinate of z."""
        a, b = self.coordinates(z)
        seen = []
        for ai in {int(mpmath.floor(a)), int(mpmath.ceil(a))}:
            for bi in {int(mpmath.floor(b)), int(mpmath.ceil(b))}:
                seen.append(self(ai, bi))
        return seen

    def parse(self, text: str) -> QuadInt:
        """Parse the CLI text form "a+b*w" (also "3", "w", "-2w", "11*w")."""
        s = str(text).replace(' ', '').replace('ω', 'w')
        if not s:
            raise UsageError("empty ring element")
        a = b = 0
        pos = 0
        while pos < len(s):
            m = _TERM.match(s, pos)
            if not m or m.end() == pos or (pos > 0 and m.group(1) is None):
                raise UsageError(f"cannot parse {text!r} as a+b*w")
            sign = -1 if m.group(1) == '-' else 1
            if m.group(3):
                b += sign * int(m.group(2))
            elif m.group(4):
                a += sign * int(m.group(4))
            else:
                b += sign
            pos = m.end()
        return self(a, b)


@dataclass(frozen=True)
class QuadInt:
    a: int
    b: int
    spec: RingSpec

    @property
    def raw(self):
        return (self.a, self.b)

    def _coerce(self, other) -> QuadInt:
        if isinstance(other, QuadInt):
            if other.spec != self.spec:
                raise UsageError(
                    f"mixed rings: d={self.spec.d} and d={other.spec.d}"
                )
            return other
        if isinstance(other, int):
            return self.spec(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadInt(self.a + other.a, self.b + other.b, self.spec)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadInt(self.a - other.a, self.b - other.b, self.spec)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return QuadInt(-self.a, -self.b, self.spec)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadInt(*self.spec.mul_raw(self.raw, other.raw), self.spec)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise UsageError("negative powers are not ring elements")
        result = self.spec.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> QuadInt:
        return QuadInt(*self.spec.conj_raw(self.raw), self.spec)

    @cached_property
    def norm(self) -> int:
        return self.spec.norm_raw(self.raw)

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    @property
    def is_unit(self) -> bool:
        return self.norm == 1

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    @property
    def sort_key(self):
        return (self.norm, self.a, self.b)

    def to_complex(self):
        with working_precision(self.norm):
            return self.spec.complex_raw(self.raw)

    def to_json(self) -> dict:
        return {'a': str(self.a), 'b': str(self.b), 'd': self.spec.d}

    @classmethod
    def from_json(cls, payload: dict) -> QuadInt:
        return RingSpec(int(payload['d']))(int(payload['a']), int(payload['b']))

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        coeff = {1: '', -1: '-'}.get(self.b, f"{self.b}*")
        if self.a == 0:
            return f"{coeff}w"
        sign = '+' if self.b > 0 else '-'
        magnitude = abs(self.b)
        term = 'w' if magnitude == 1 else f"{magnitude}*w"
        return f"{self.a}{sign}{term}"


def _require_same(x: QuadInt, y: QuadInt):
    if x.spec != y.spec:
        raise UsageError(f"mixed rings: d={x.spec.d} and d={y.spec.d}")


def qi_arith(x: QuadInt, y: Optional[QuadInt], op: str) -> QuadInt:
    if op == 'conj':
        return x.conj()
    if op == 'neg':
        return -x
    _require_same(x, y)
    if op == 'add':
        return x + y
    if op == 'sub':
        return x - y
    if op == 'mul':
        return x * y
    raise UsageError(f"unknown ring operation {op!r}")


def qi_norm(x: QuadInt) -> int:
    return x.norm


def qi_sqrt(z: QuadInt) -> Optional[QuadInt]:
    """Exact square root, the larger of +-w by (a, b), or None."""
    if z.is_zero:
        return z
    n = math.isqrt(z.norm)
    if n * n != z.norm:
        return None
    found = []
    with working_precision(z.norm):
        root = mpmath.sqrt(z.spec.complex_raw(z.raw))
        for w in (root, -root):
            for candidate in z.spec.nearby(w):
                if candidate * candidate == z and candidate not in found:
                    found.append(candidate)
    if not found:
        return None
    return max(found, key=lambda w: (w.a, w.b))


def qi_divides(x: QuadInt, y: QuadInt) -> Optional[QuadInt]:
    """The quotient q with q*x = y when y/x lies in O_d, else None."""
    _require_same(x, y)
    if x.is_zero:
        raise UsageError("division by zero")
    q = x.spec.divides_raw(x.raw, y.raw)
    if q is None:
        return None
    return QuadInt(*q, x.spec)


def exact_quotient(y: QuadInt, x: QuadInt, what: str = 'quotient') -> QuadInt:
    q = qi_divides(x, y)
    if q is None:
        raise InvariantViolation(f"{what}: {y} is not divisible by {x} in O_{x.spec.d}")
    return q


def canonical(x: QuadInt) -> QuadInt:
    """Representative of the associate class maximizing (a, b)."""
    return max((u * x for u in x.spec.units), key=lambda y: (y.a, y.b))


def nearest_quotient(y: QuadInt, x: QuadInt) -> QuadInt:
    """A lattice point closest to y/x (ties toward the larger (a, b))."""
    n = x.norm
    num = y * x.conj()
    fa, fb = Fraction(num.a, n), Fraction(num.b, n)
    spec = x.spec
    best = None
    for b in range(math.floor(fb), math.ceil(fb) + 1):
        for a in range(math.floor(fa) - 1, math.ceil(fa) + 2):
            da, db = fa - a, fb - b
            if spec.half_integral:
                dist = da * da + da * db + spec._k * db * db
            else:
                dist = da * da + spec.d * db * db
            key = (dist, -a, -b)
            if best is None or key < best[0]:
                best = (key, spec(a, b))
    return best[1]


def euclid_gcd(x: QuadInt, y: QuadInt) -> QuadInt:
    if not x.spec.euclidean:
        raise UnsupportedError(
            f"gcd needs a Euclidean ring; d={x.spec.d} is not Euclidean"
        )
    while not y.is_zero:
        q = nearest_quotient(x, y)
        r = x - q * y
        if r.norm >= y.norm:
            raise InvariantViolation(f"Euclidean step did not reduce the norm ({x}, {y})")
        x, y = y, r
    return x


def qi_content(xs: Iterable[QuadInt]) -> QuadInt:
    xs = list(xs)
    if not xs or all(x.is_zero for x in xs):
        raise UsageError("content of an all-zero list is undefined")
    spec = xs[0].spec
    for x in xs:
        _require_same(xs[0], x)
    if not spec.euclidean:
        raise UnsupportedError(
            f"content over O_{spec.d} is not supported (non-Euclidean ring)"
        )
    g = spec.zero
    for x in xs:
        g = euclid_gcd(g, x) if not g.is_zero else x
    return canonical(g)


def lattice_ball_raw(spec: RingSpec, bound: int) -> list:
    """Coordinates (a, b) with norm <= bound, ordered by (norm, a, b)."""
    if bound < 0:
        return []
    points = []
    if spec.half_integral:
        # (2a + b)^2 + d b^2 <= 4 * bound
        bmax = math.isqrt(4 * bound // spec.d)
        for b in range(-bmax, bmax + 1):
            rem = 4 * bound - spec.d * b * b
            if rem < 0:
                continue
            s = math.isqrt(rem)
            for a in range(-((s + b) // 2), (s - b) // 2 + 1):
                points.append((a, b))
    else:
        bmax = math.isqrt(bound // spec.d)
        for b in range(-bmax, bmax + 1):
            s = math.isqrt(bound - spec.d * b * b)
            for a in range(-s, s + 1):
                points.append((a, b))
    points.sort(key=lambda p: (spec.norm_raw(p), p[0], p[1]))
    return points


def lattice_ball(spec: RingSpec, bound: int) -> list:
    return [QuadInt(a, b, spec) for a, b in lattice_ball_raw(spec, bound)]


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n)."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * jacobi_symbol(a % n, n)


def norm_equation(spec: RingSpec, n: int) -> Optional[QuadInt]:
    """Some x with N(x) = n, found by exhausting the b coordinate; None if there is none."""
    if spec.half_integral:
        for b in range(0, math.isqrt(4 * n // spec.d) + 1):
            rem = 4 * n - spec.d * b * b
            s = math.isqrt(rem)
            if s * s == rem and (s - b) % 2 == 0:
                return spec((s - b) // 2, b)
    else:
        for b in range(0, math.isqrt(n // spec.d) + 1):
            rem = n - spec.d * b * b
            s = math.isqrt(rem)
            if s * s == rem:
                return spec(s, b)
    return None


def _omega_root_mod(spec: RingSpec, p: int) -> Optional[int]:
    """A root of the minimal polynomial of w modulo p."""
    if p == 2:
        for r in (0, 1):
            value = r * r - r + spec._k if spec.half_integral else r * r + spec.d
            if value % 2 == 0:
                return r
        return None
    s = sqrt_mod(-spec.d % p, p)
    if s is None:
        return None
    if spec.half_integral:
        return (1 + s) * pow(2, -1, p) % p
    return s


def primes_above(spec: RingSpec, p: int) -> list:
    """Canonical prime elements above the rational prime p (one or two of them)."""
    if not isprime(p):
        raise UsageError(f"{p} is not a rational prime")
    symbol = kronecker(spec.field_discriminant, p)
    if symbol == -1:
        return [spec(p)]
    pi = None
    if spec.euclidean:
        r = _omega_root_mod(spec, p)
        if r is not None:
            pi = qi_content([spec(p), spec(-r, 1)])
            if pi.norm != p:
                logger.debug(f"gcd route gave norm {pi.norm} above {p}; using norm search")
                pi = None
    if pi is None:
        pi = norm_equation(spec, p)
        if pi is None:
            raise UnsupportedError(
                f"norm-equation search exhausted: no element of norm {p} in O_{spec.d}"
            )
    pi = canonical(pi)
    if symbol == 0:
        return [pi]
    other = canonical(pi.conj())
    return sorted({pi, other}, key=lambda x: (x.a, x.b), reverse=True)
