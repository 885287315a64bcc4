from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence
import functools
import itertools
import math
import warnings

import structlog

from .errors import DegenerateInputError, PreconditionError, ValidityError
from .exactnum import (
    Mat3Z,
    Vec3Z,
    cross,
    cross_primitive,
    delzant_witness,
    det3,
    is_delzant_pair,
    is_primitive,
)

logger = structlog.get_logger(__name__)


FACE_ORDER = "face-order"
CONVEXITY = "convexity-det"
DELZANT = "delzant-pair"


@dataclass(slots=True, frozen=True)
class GoodCone:
    """Cyclically ordered primitive inward normals n^0, ..., n^k of a cone in R^3.

    Indexing is cyclic: ``cone[i]`` is ``normals[i % len(cone)]``.
    """

    normals: tuple[Vec3Z, ...]

    def __post_init__(self):
        normals = tuple(tuple(int(a) for a in n) for n in self.normals)
        if len(normals) < 3:
            raise DegenerateInputError(f"a cone needs at least 3 normals, got {len(normals)}")
        for n in normals:
            if len(n) != 3:
                raise DegenerateInputError(f"normal {n} is not a 3-vector")
            if not any(n):
                raise DegenerateInputError("zero normal")
            if not is_primitive(n):
                raise PreconditionError(f"normal {n} is not primitive")
        object.__setattr__(self, "normals", normals)

    @classmethod
    def load(cls, normals: Iterable[Sequence[int]]) -> GoodCone:
        """Build a cone, reversing the cyclic order when det3(n0, n1, n2) < 0."""
        cone = cls(tuple(normals))  # type: ignore[arg-type]
        if det3(cone[0], cone[1], cone[2]) < 0:
            warnings.warn("normals are negatively oriented, reversing cyclic order")
            cone = cone.reversed()
        return cone

    def reversed(self) -> GoodCone:
        n = self.normals
        return GoodCone((n[0],) + tuple(reversed(n[1:])))

    def __len__(self) -> int:
        return len(self.normals)

    def __getitem__(self, i: int) -> Vec3Z:
        return self.normals[i % len(self.normals)]

    def __iter__(self) -> Iterator[Vec3Z]:
        return iter(self.normals)

    def index(self, i: int) -> int:
        return i % len(self.normals)

    def transform(self, u: Mat3Z) -> GoodCone:
        """Image under a unimodular change of lattice coordinates."""
        if not u.is_unimodular():
            raise PreconditionError("coordinate change must be unimodular")
        cone = GoodCone(tuple(u.apply(n) for n in self.normals))  # type: ignore[arg-type]
        return cone.reversed() if u.det() < 0 else cone

    def replace(self, normals: Iterable[Sequence[int]]) -> GoodCone:
        return GoodCone(tuple(normals))  # type: ignore[arg-type]


@dataclass(slots=True, frozen=True)
class Failure:
    kind: str
    indices: tuple[int, ...]


@dataclass(slots=True, frozen=True)
class ValidityReport:
    failures: tuple[Failure, ...] = ()

    @property
    def is_good(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.is_good


@dataclass(slots=True, frozen=True)
class FaceInvariants:
    b: int
    f: int
    gluing: Mat3Z

    @property
    def heegaard_det(self) -> int:
        g = self.gluing
        return g.entry(0, 0) * g.entry(1, 1) - g.entry(0, 1) * g.entry(1, 0)


@functools.lru_cache(maxsize=4096)
def validate(cone: GoodCone) -> ValidityReport:
    failures: list[Failure] = []
    size = len(cone)

    for i, j in itertools.combinations(range(size), 2):
        if not any(cross(cone[i], cone[j])):
            failures.append(Failure(FACE_ORDER, (i, j)))

    for i in range(size):
        for j in range(size):
            if j in (i, (i + 1) % size):
                continue
            if det3(cone[i], cone[i + 1], cone[j]) <= 0:
                failures.append(Failure(CONVEXITY, (i, (i + 1) % size, j)))

    for i in range(size):
        if any(cross(cone[i], cone[i + 1])) and not is_delzant_pair(cone[i], cone[i + 1]):
            failures.append(Failure(DELZANT, (i, (i + 1) % size)))

    report = ValidityReport(tuple(failures))
    if failures:
        logger.debug("invalid cone", size=size, failures=len(failures))
    return report


def require_good(cone: GoodCone) -> GoodCone:
    report = validate(cone)
    if not report.is_good:
        raise ValidityError(f"cone is not good: {report.failures[0]}", report)
    return cone


def edge_ray(cone: GoodCone, i: int) -> Vec3Z:
    """Primitive inward ray of the edge n^i ∩ n^{i+1}."""
    require_good(cone)
    return cross_primitive(cone[i], cone[i + 1])


def edge_rays(cone: GoodCone) -> tuple[Vec3Z, ...]:
    require_good(cone)
    return tuple(cross_primitive(cone[i], cone[i + 1]) for i in range(len(cone)))


def witness(cone: GoodCone, i: int) -> Vec3Z:
    """Canonical l^i with det3(n^i, n^{i+1}, l^i) = 1."""
    l = delzant_witness(cone[i], cone[i + 1])
    if l is None:
        raise ValidityError(
            f"faces {cone.index(i)} and {cone.index(i + 1)} are not a Delzant pair",
            ValidityReport((Failure(DELZANT, (cone.index(i), cone.index(i + 1))),)),
        )
    return l


def face_invariants(cone: GoodCone, i: int, l1: Vec3Z | None = None, l2: Vec3Z | None = None) -> FaceInvariants:
    """Lens-space data (b, f) and gluing matrix of face i.

    With the triple (n1, n2, n3) = (n^{i-1}, n^i, n^{i+1}): b = det3(n1, n2, n3),
    f = det3(n1, n3, l2) mod b where det3(n2, n3, l2) = 1, and the gluing matrix
    A = (l2 n3 n2)^{-1} (l1 n1 n2) where det3(n1, n2, l1) = 1.
    Witnesses may be supplied to check independence of the choice.
    """
    require_good(cone)
    n1, n2, n3 = cone[i - 1], cone[i], cone[i + 1]
    l1 = l1 if l1 is not None else witness(cone, i - 1)
    l2 = l2 if l2 is not None else witness(cone, i)
    if det3(n1, n2, l1) != 1 or det3(n2, n3, l2) != 1:
        raise PreconditionError("supplied witnesses do not have determinant 1")

    b = det3(n1, n2, n3)
    f = det3(n1, n3, l2) % b
    gluing = Mat3Z.from_columns(l2, n3, n2).left_divide(Mat3Z.from_columns(l1, n1, n2))
    return FaceInvariants(b, f, gluing)


def can_blowdown_to_orbit(cone: GoodCone, i: int) -> bool:
    inv = face_invariants(cone, i)
    return math.gcd(inv.b, inv.f) == 1


def gluing_matrix(cone: GoodCone, i: int) -> Mat3Z:
    """X with (n^{i+2} l^{i+1} n^{i+1}) = (n^i l^i n^{i+1}) X.

    X has the shape ((a b 0) (c d 0) (e f 1)); c = det3(n^i, n^{i+1}, n^{i+2}).
    """
    ni, nj, nk = cone[i], cone[i + 1], cone[i + 2]
    li, lj = witness(cone, i), witness(cone, i + 1)
    return Mat3Z.from_columns(ni, li, nj).left_divide(Mat3Z.from_columns(nk, lj, nj))


def gluing_ce(cone: GoodCone, i: int) -> tuple[int, int]:
    x = gluing_matrix(cone, i)
    return x.entry(1, 0), x.entry(2, 0)
