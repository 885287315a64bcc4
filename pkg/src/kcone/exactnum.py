from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union
import functools
import itertools
import math

import structlog
from sympy import Matrix, factorint, isprime
from sympy.core.intfunc import igcdex
from sympy.matrices.normalforms import hermite_normal_form

from .errors import (
    DegenerateInputError,
    NoProgressionError,
    PreconditionError,
)

logger = structlog.get_logger(__name__)


DISCRIMINANT = 2
_UNIT = ((1, 0, 0), (0, 1, 0), (0, 0, 1))

Rational = Union[int, Fraction]
Scalar = Union[int, Fraction, "QuadNumber"]

Vec2Z = tuple[int, int]
Vec3Z = tuple[int, int, int]
Vec3Q = tuple[Fraction, Fraction, Fraction]
Vec3Quad = tuple["QuadNumber", "QuadNumber", "QuadNumber"]


@functools.cache
def check_discriminant(d: int) -> int:
    if d < 2 or any(e > 1 for e in factorint(d).values()):
        raise PreconditionError(f"discriminant must be a square-free integer >= 2, got {d}")
    return d


def _sign(x: Rational) -> int:
    return (x > 0) - (x < 0)


@dataclass(slots=True, frozen=True, eq=False)
class QuadNumber:
    """Exact element rat + irr * sqrt(d) of the real quadratic field Q(sqrt(d))."""

    rat: Fraction
    irr: Fraction = Fraction(0)
    d: int = DISCRIMINANT

    def __post_init__(self):
        object.__setattr__(self, "rat", Fraction(self.rat))
        object.__setattr__(self, "irr", Fraction(self.irr))
        check_discriminant(self.d)

    @classmethod
    def of(cls, value: Scalar, d: int) -> QuadNumber:
        if isinstance(value, QuadNumber):
            if value.d != d:
                raise TypeError(f"mixed discriminants {value.d} and {d}")
            return value
        return cls(Fraction(value), Fraction(0), d)

    def _coerce(self, other: object) -> QuadNumber | None:
        if isinstance(other, QuadNumber):
            if other.d != self.d:
                raise TypeError(f"mixed discriminants {self.d} and {other.d}")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadNumber(Fraction(other), Fraction(0), self.d)
        return None

    @property
    def is_rational(self) -> bool:
        return self.irr == 0

    @property
    def is_zero(self) -> bool:
        return self.rat == 0 and self.irr == 0

    def conjugate(self) -> QuadNumber:
        return QuadNumber(self.rat, -self.irr, self.d)

    def norm(self) -> Fraction:
        return self.rat * self.rat - self.d * self.irr * self.irr

    def sign(self) -> int:
        a, b = self.rat, self.irr
        if b == 0:
            return _sign(a)
        if a == 0:
            return _sign(b)
        if _sign(a) == _sign(b):
            return _sign(a)
        # opposite signs: the larger magnitude wins, a^2 == d b^2 is impossible
        return _sign(a) if a * a > self.d * b * b else _sign(b)

    def __abs__(self) -> QuadNumber:
        return -self if self.sign() < 0 else self

    def __neg__(self) -> QuadNumber:
        return QuadNumber(-self.rat, -self.irr, self.d)

    def __pos__(self) -> QuadNumber:
        return self

    def __add__(self, other: object) -> QuadNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadNumber(self.rat + o.rat, self.irr + o.irr, self.d)

    __radd__ = __add__

    def __sub__(self, other: object) -> QuadNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadNumber(self.rat - o.rat, self.irr - o.irr, self.d)

    def __rsub__(self, other: object) -> QuadNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: object) -> QuadNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadNumber(
            self.rat * o.rat + self.d * self.irr * o.irr,
            self.rat * o.irr + self.irr * o.rat,
            self.d,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> QuadNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt(d))")
        num = self * o.conjugate()
        return QuadNumber(num.rat / n, num.irr / n, self.d)

    def __rtruediv__(self, other: object) -> QuadNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __eq__(self, other: object) -> bool:
        try:
            o = self._coerce(other)
        except TypeError:
            return False
        if o is None:
            return NotImplemented
        return self.rat == o.rat and self.irr == o.irr

    def __hash__(self) -> int:
        if self.irr == 0:
            return hash(self.rat)
        return hash((self.rat, self.irr, self.d))

    def _cmp(self, other: object) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare QuadNumber with {type(other).__name__}")
        return (self - o).sign()

    def __lt__(self, other: object) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: object) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: object) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: object) -> bool:
        return self._cmp(other) >= 0

    def __bool__(self) -> bool:
        return not self.is_zero

    def __float__(self) -> float:
        return float(self.rat) + float(self.irr) * math.sqrt(self.d)

    def __str__(self) -> str:
        if self.irr == 0:
            return str(self.rat)
        return f"{self.rat}+{self.irr}*sqrt({self.d})"


# vectors are plain tuples; every helper is generic over the scalar type


def dot(u: Sequence, v: Sequence):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def cross(u: Sequence, v: Sequence) -> tuple:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def det3(u: Sequence, v: Sequence, w: Sequence):
    return dot(cross(u, v), w)


def det2(u: Sequence, v: Sequence):
    return u[0] * v[1] - u[1] * v[0]


def vadd(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, u: Sequence) -> tuple:
    return tuple(c * a for a in u)


def vneg(u: Sequence) -> tuple:
    return tuple(-a for a in u)


def combine(coefficients: Iterable, vectors: Iterable[Sequence]) -> tuple:
    out: tuple | None = None
    for c, v in zip(coefficients, vectors):
        term = vscale(c, v)
        out = term if out is None else vadd(out, term)
    if out is None:
        raise DegenerateInputError("empty linear combination")
    return out


def content(v: Iterable[int]) -> int:
    return math.gcd(*v)


def is_primitive(v: Sequence[int]) -> bool:
    return content(v) == 1


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = content(v)
    if g == 0:
        raise DegenerateInputError("zero vector has no primitive direction")
    return tuple(a // g for a in v)


def integral(v: Sequence[Rational]) -> tuple[int, ...]:
    """Clear denominators of a rational vector, keeping the direction."""
    den = math.lcm(*(Fraction(a).denominator for a in v))
    return tuple(int(Fraction(a) * den) for a in v)


def lattice_key(v: Sequence[int]) -> tuple:
    return (max(abs(a) for a in v), sum(abs(a) for a in v), tuple(v))


def cross_primitive(u: Sequence[int], v: Sequence[int]) -> Vec3Z:
    c = cross(u, v)
    if not any(c):
        raise DegenerateInputError(f"{tuple(u)} and {tuple(v)} are parallel")
    return primitive(c)  # type: ignore[return-value]


def _lagrange(b1: tuple[int, ...], b2: tuple[int, ...]):
    # Gauss-Lagrange reduction of a rank 2 lattice basis
    while True:
        if dot(b1, b1) > dot(b2, b2):
            b1, b2 = b2, b1
        mu = round(Fraction(dot(b1, b2), dot(b1, b1)))
        if mu == 0:
            return b1, b2
        b2 = vsub(b2, vscale(mu, b1))


def is_delzant_pair(n: Sequence[int], m: Sequence[int]) -> bool:
    return content(cross(n, m)) == 1


def delzant_witness(n: Sequence[int], m: Sequence[int]) -> Vec3Z | None:
    """Integer l with det3(n, m, l) = 1, or None when the pair is not Delzant.

    The witness is reduced modulo Z n + Z m to a short canonical representative.
    """
    if not (is_primitive(n) and is_primitive(m)):
        raise PreconditionError(f"normals must be primitive: {tuple(n)}, {tuple(m)}")

    c = cross(n, m)
    if content(c) != 1:
        return None

    x1, y1, g1 = igcdex(c[0], c[1])
    x2, y2, g2 = igcdex(g1, c[2])
    l0 = (int(x2 * x1), int(x2 * y1), int(y2))
    if g2 < 0:
        l0 = vneg(l0)
    assert dot(c, l0) == 1

    b1, b2 = _lagrange(tuple(n), tuple(m))
    g11, g12, g22 = dot(b1, b1), dot(b1, b2), dot(b2, b2)
    r1, r2 = -dot(b1, l0), -dot(b2, l0)
    den = g11 * g22 - g12 * g12
    a0 = round(Fraction(r1 * g22 - r2 * g12, den))
    c0 = round(Fraction(g11 * r2 - g12 * r1, den))

    candidates = (
        combine((1, a, b), (l0, b1, b2))
        for a in range(a0 - 2, a0 + 3)
        for b in range(c0 - 2, c0 + 3)
    )
    return min(candidates, key=lattice_key)  # type: ignore[return-value]


def plane_lattice_basis(v0: Sequence[int]) -> tuple[Vec3Z, Vec3Z]:
    """Basis (u1, u2) of Z^3 ∩ v0^⊥ with det3(u1, u2, v0) > 0.

    For primitive v0 the products v0 × e_j generate the plane lattice; the
    nonzero columns of their Hermite normal form are a basis of it.
    """
    if not any(v0):
        raise DegenerateInputError("zero normal")
    if not is_primitive(v0):
        raise PreconditionError(f"normal must be primitive: {tuple(v0)}")

    generators = Matrix.hstack(*(Matrix(cross(v0, e)) for e in _UNIT))
    h = hermite_normal_form(generators)
    kernel = [tuple(int(a) for a in h.col(j)) for j in range(h.cols) if any(h.col(j))]
    if len(kernel) != 2:
        raise DegenerateInputError(f"plane lattice of {tuple(v0)} has rank {len(kernel)}")
    u1, u2 = _lagrange(kernel[0], kernel[1])
    if det3(u1, u2, v0) < 0:
        u2 = vneg(u2)
    return u1, u2  # type: ignore[return-value]


def plane_point(v0: Sequence[int], value: int) -> Vec3Z:
    """A short integer x with v0·x = value."""
    if not is_primitive(v0):
        raise PreconditionError(f"normal must be primitive: {tuple(v0)}")
    x1, y1, g1 = igcdex(v0[0], v0[1])
    x2, y2, g2 = igcdex(g1, v0[2])
    x = vscale(value * (1 if g2 > 0 else -1), (int(x2 * x1), int(x2 * y1), int(y2)))
    u1, u2 = plane_lattice_basis(v0)
    g11, g12, g22 = dot(u1, u1), dot(u1, u2), dot(u2, u2)
    r1, r2 = -dot(u1, x), -dot(u2, x)
    den = g11 * g22 - g12 * g12
    a = round(Fraction(r1 * g22 - r2 * g12, den))
    b = round(Fraction(g11 * r2 - g12 * r1, den))
    return combine((1, a, b), (x, u1, u2))  # type: ignore[return-value]


def lie_coordinates(x: Sequence, u1: Sequence[int], u2: Sequence[int], v0: Sequence[int]):
    """Coordinates (a, b) of x ∈ span(u1, u2) in the basis (u1, u2)."""
    den = det3(u1, u2, v0)
    return det3(x, u2, v0) / Fraction(den), det3(u1, x, v0) / Fraction(den)


def prime_in_progression(a: int, m: int, lower: int) -> int:
    """Smallest prime p >= lower with p ≡ a (mod m)."""
    if m <= 0:
        raise PreconditionError(f"modulus must be positive, got {m}")
    if math.gcd(a, m) != 1:
        raise NoProgressionError(f"gcd({a}, {m}) != 1, no primes in the progression")

    p = lower + (a - lower) % m
    while p < 2:
        p += m
    while not isprime(p):
        p += m
    return p


@dataclass(slots=True, frozen=True)
class Mat3Z:
    """3x3 integer matrix stored by columns."""

    columns: tuple[Vec3Z, Vec3Z, Vec3Z]

    @classmethod
    def from_columns(cls, *columns: Sequence[int]) -> Mat3Z:
        return cls(tuple(tuple(int(a) for a in c) for c in columns))  # type: ignore[arg-type]

    def entry(self, row: int, col: int) -> int:
        return self.columns[col][row]

    @property
    def rows(self) -> tuple[Vec3Z, Vec3Z, Vec3Z]:
        return tuple(tuple(c[i] for c in self.columns) for i in range(3))  # type: ignore[return-value]

    def det(self) -> int:
        return det3(*self.columns)

    def is_unimodular(self) -> bool:
        return abs(self.det()) == 1

    def apply(self, v: Sequence) -> tuple:
        return combine(v, self.columns)

    def __matmul__(self, other: Mat3Z) -> Mat3Z:
        return Mat3Z.from_columns(*(self.apply(c) for c in other.columns))

    def to_matrix(self) -> Matrix:
        return Matrix(self.rows)

    def _inverse_matrix(self) -> Matrix:
        if self.det() == 0:
            raise DegenerateInputError("singular matrix")
        return self.to_matrix().inv()

    def solve(self, b: Sequence) -> tuple:
        """Exact x with self.apply(x) = b."""
        x = self._inverse_matrix() * Matrix([Fraction(a) for a in b])
        return tuple(_fraction(a) for a in x)

    def left_divide(self, other: Mat3Z) -> Mat3Z:
        """The integer matrix X with self @ X = other."""
        x = self._inverse_matrix() * other.to_matrix()
        if not all(a.is_integer for a in x):
            raise DegenerateInputError("quotient matrix is not integral")
        return Mat3Z.from_columns(*(tuple(int(a) for a in x.col(j)) for j in range(3)))

    def inverse(self) -> tuple[Vec3Q, Vec3Q, Vec3Q]:
        """Columns of the rational inverse."""
        x = self._inverse_matrix()
        return tuple(tuple(_fraction(a) for a in x.col(j)) for j in range(3))  # type: ignore[return-value]

    def transpose(self) -> Mat3Z:
        return Mat3Z.from_columns(*self.rows)

    @classmethod
    def identity(cls) -> Mat3Z:
        return cls(_UNIT)


def _fraction(x) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def hermite_frame(c1: Sequence[int], c2: Sequence[int]) -> tuple[tuple[int, int], tuple[int, int]]:
    """Rows of the unique U ∈ GL(2,Z) putting the matrix with columns (c1, c2)
    into upper Hermite form: U c1 = (g, 0) with g > 0, U c2 = (h12, h22) with
    h22 > 0 and 0 <= h12 < h22.

    sympy reduces columns to an upper triangular form; conjugating by the swap
    turns that into the row form above.
    """
    if det2(c1, c2) == 0:
        raise DegenerateInputError("frame vectors are parallel")
    c = Matrix([[c1[0], c2[0]], [c1[1], c2[1]]])
    swap = Matrix([[0, 1], [1, 0]])
    k = hermite_normal_form((swap * c * swap).T)
    u = swap * k.T * swap * c.inv()
    return tuple(tuple(int(a) for a in u.row(r)) for r in range(2))  # type: ignore[return-value]


def dot2(u: Sequence, v: Sequence):
    return u[0] * v[0] + u[1] * v[1]


def apply2(rows: Sequence[Sequence[int]], v: Sequence) -> tuple:
    return (dot2(rows[0], v), dot2(rows[1], v))


@functools.cache
def coprime_pairs(radius: int) -> tuple[tuple[int, int], ...]:
    """Coprime (a, b) with max(|a|, |b|) <= radius in increasing size order."""
    pairs = (
        (a, b)
        for a, b in itertools.product(range(-radius, radius + 1), repeat=2)
        if math.gcd(a, b) == 1
    )
    return tuple(sorted(pairs, key=_size_key))


@functools.cache
def box_pairs(radius: int) -> tuple[tuple[int, int], ...]:
    """All (a, b) with max(|a|, |b|) <= radius in increasing size order."""
    pairs = itertools.product(range(-radius, radius + 1), repeat=2)
    return tuple(sorted(pairs, key=_size_key))


def _size_key(p: tuple[int, int]):
    return (max(abs(p[0]), abs(p[1])), abs(p[0]) + abs(p[1]), p)
