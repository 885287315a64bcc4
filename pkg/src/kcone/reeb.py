from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence
import functools
import math

import structlog

from .cone import GoodCone, edge_rays, require_good
from .errors import (
    DegenerateInputError,
    IdentityViolation,
    PreconditionError,
    RankError,
    SearchExhaustedError,
)
from .exactnum import (
    DISCRIMINANT,
    Mat3Z,
    QuadNumber,
    Vec3Q,
    Vec3Z,
    check_discriminant,
    coprime_pairs,
    combine,
    cross,
    cross_primitive,
    det3,
    dot,
    integral,
    plane_lattice_basis,
    plane_point,
    vsub,
)

logger = structlog.get_logger(__name__)


TRANSVERSE_BOX = 32


@dataclass(slots=True, frozen=True)
class ReebVector:
    """R = p + sqrt(d) q with rational 3-vectors p and q."""

    p: Vec3Q
    q: Vec3Q = (Fraction(0), Fraction(0), Fraction(0))
    d: int = DISCRIMINANT

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(Fraction(a) for a in self.p))
        object.__setattr__(self, "q", tuple(Fraction(a) for a in self.q))
        check_discriminant(self.d)
        if len(self.p) != 3 or len(self.q) != 3:
            raise DegenerateInputError("Reeb components must be 3-vectors")
        if not any(self.p) and not any(self.q):
            raise DegenerateInputError("zero Reeb vector")

    @property
    def value(self) -> tuple[QuadNumber, QuadNumber, QuadNumber]:
        return tuple(QuadNumber(a, b, self.d) for a, b in zip(self.p, self.q))  # type: ignore[return-value]

    def pair(self, v: Sequence) -> QuadNumber:
        """The exact pairing R·v with a rational vector v."""
        return QuadNumber(dot(self.p, v), dot(self.q, v), self.d)

    def transform(self, u: Mat3Z) -> ReebVector:
        return ReebVector(u.apply(self.p), u.apply(self.q), self.d)  # type: ignore[arg-type]


def rank_of(reeb: ReebVector) -> Literal[1, 2]:
    return 1 if not any(cross(reeb.p, reeb.q)) else 2


def is_admissible(cone: GoodCone, reeb: ReebVector) -> bool:
    return all(reeb.pair(e) > 0 for e in edge_rays(cone))


def require_admissible(cone: GoodCone, reeb: ReebVector):
    if not is_admissible(cone, reeb):
        raise PreconditionError("Reeb vector is not in the interior of the dual cone")


@dataclass(slots=True, frozen=True)
class MomentPolygon:
    """Cross-section of the cone by {R·v = 1}; vertex i lies on faces i and i+1."""

    rays: tuple[Vec3Z, ...]
    vertices: tuple[tuple[QuadNumber, QuadNumber, QuadNumber], ...]


def moment_polygon(cone: GoodCone, reeb: ReebVector) -> MomentPolygon:
    require_admissible(cone, reeb)
    rays = edge_rays(cone)
    vertices = []
    for e in rays:
        s = reeb.pair(e)
        vertices.append(tuple(QuadNumber(a, 0, reeb.d) / s for a in e))
    return MomentPolygon(rays, tuple(vertices))  # type: ignore[arg-type]


@dataclass(slots=True, frozen=True)
class IsotropyProfile:
    v0: Vec3Z
    s: tuple[int, ...]  # signed v0·n^i
    k: tuple[int, ...]
    flats: tuple[int, ...]
    vertex_orders: tuple[int, ...]
    lie_basis: tuple[Vec3Z, Vec3Z]

    def is_flat(self, i: int) -> bool:
        return self.k[i % len(self.k)] == 0


def lie_normal(reeb: ReebVector) -> Vec3Z:
    if rank_of(reeb) != 2:
        raise RankError("rank 1 Reeb vector has no rank 2 isotropy profile")
    return cross_primitive(integral(reeb.p), integral(reeb.q))


@functools.lru_cache(maxsize=1024)
def isotropy_profile(cone: GoodCone, reeb: ReebVector) -> IsotropyProfile:
    require_good(cone)
    v0 = lie_normal(reeb)
    require_admissible(cone, reeb)

    s = tuple(dot(v0, n) for n in cone)
    k = tuple(abs(x) for x in s)
    flats = tuple(i for i, x in enumerate(k) if x == 0)
    orders = tuple(math.gcd(k[i], k[(i + 1) % len(k)]) for i in range(len(k)))
    if len(flats) > 2:
        raise IdentityViolation(f"{len(flats)} flat faces on a rank 2 pair", [{"flats": flats}])

    return IsotropyProfile(v0, s, k, flats, orders, plane_lattice_basis(v0))


def is_transverse(cone: GoodCone, reeb: ReebVector, y: Sequence[int]) -> bool:
    """Y pairs positively with every vertex of the moment polygon."""
    return all(dot(y, e) > 0 for e in edge_rays(cone))


def choose_transverse_circle(cone: GoodCone, reeb: ReebVector, box: int = TRANSVERSE_BOX) -> Vec3Z:
    profile = isotropy_profile(cone, reeb)
    u1, u2 = profile.lie_basis
    rays = edge_rays(cone)

    for a, b in coprime_pairs(box):
        y = combine((a, b), (u1, u2))
        if all(dot(y, e) > 0 for e in rays):
            logger.debug("transverse circle", y=y, a=a, b=b)
            return y  # type: ignore[return-value]

    raise SearchExhaustedError(
        f"no transverse circle within box {box}", box=box, v0=profile.v0
    )


def levels(cone: GoodCone, reeb: ReebVector, y: Sequence[int]) -> tuple[QuadNumber, ...]:
    """Values of the functional ⟨Y,·⟩ at the polygon vertices."""
    return tuple(QuadNumber(dot(y, e), 0, reeb.d) / reeb.pair(e) for e in edge_rays(cone))


@dataclass(slots=True, frozen=True)
class Extreme:
    kind: Literal["flat", "vertex"]
    index: int
    level: QuadNumber


@dataclass(slots=True, frozen=True)
class Chain:
    """Faces strictly between the two extremes, with the vertices joining them."""

    faces: tuple[int, ...]
    vertices: tuple[int, ...]

    @property
    def is_nontrivial(self) -> bool:
        return bool(self.vertices) or len(self.faces) > 1


@dataclass(slots=True, frozen=True)
class LevelStructure:
    minimum: Extreme
    maximum: Extreme
    chains: tuple[Chain, Chain]


def _extreme(cone: GoodCone, profile: IsotropyProfile, values, pick) -> Extreme:
    size = len(cone)
    target = pick(values)
    at = [i for i, v in enumerate(values) if v == target]
    if len(at) == 1:
        return Extreme("vertex", at[0], target)
    # two vertices on one level: the face joining them is flat
    for beta in profile.flats:
        if {(beta - 1) % size, beta} == set(at):
            return Extreme("flat", beta, target)
    raise IdentityViolation("extreme level is not a vertex or a flat face", [{"vertices": at}])


def level_structure(cone: GoodCone, reeb: ReebVector, y: Sequence[int]) -> LevelStructure:
    profile = isotropy_profile(cone, reeb)
    if dot(y, profile.v0) != 0:
        raise PreconditionError("Y does not lie in Lie(G)")
    if not is_transverse(cone, reeb, y):
        raise PreconditionError("Y is not transverse to the contact distribution")

    values = levels(cone, reeb, y)
    lo = _extreme(cone, profile, values, min)
    hi = _extreme(cone, profile, values, max)

    # cyclic sequence f0 v0 f1 v1 ...; element 2i is face i, 2i+1 is vertex i
    size = len(cone)
    removed: set[int] = set()
    for ex in (lo, hi):
        if ex.kind == "vertex":
            removed.add(2 * ex.index + 1)
        else:
            removed.update({(2 * ex.index - 1) % (2 * size), 2 * ex.index, 2 * ex.index + 1})

    def run(start: int) -> Chain:
        faces, vertices = [], []
        pos = (start + 1) % (2 * size)
        while pos not in removed:
            (vertices if pos % 2 else faces).append(pos // 2)
            pos = (pos + 1) % (2 * size)
        return Chain(tuple(faces), tuple(vertices))

    # a vertex extreme sits at 2i+1, a flat one ends there
    return LevelStructure(lo, hi, (run(2 * lo.index + 1), run(2 * hi.index + 1)))


@dataclass(slots=True, frozen=True)
class SlopeChart:
    """Slopes of the face lines in the chart of {R·v = 1} given by (ν, Y).

    ν is an integer vector with v0·ν = 1 and δ = det3(Y, ν, R).
    """

    nu: Vec3Z
    delta: QuadNumber
    slopes: tuple[QuadNumber | None, ...]  # None at flat faces


def slope_chart(cone: GoodCone, reeb: ReebVector, y: Sequence[int]) -> SlopeChart:
    profile = isotropy_profile(cone, reeb)
    nu = plane_point(profile.v0, 1)
    r = reeb.value
    delta = det3(y, nu, r)
    slopes = tuple(
        None if s == 0 else -det3(n, nu, r) / (delta * s)
        for n, s in zip(cone, profile.s)
    )
    return SlopeChart(nu, delta, slopes)


def slope_change(cone: GoodCone, reeb: ReebVector, y: Sequence[int], i: int) -> QuadNumber:
    """Determinant form of slope(i) - slope(i+1) for consecutive non-flat faces."""
    profile = isotropy_profile(cone, reeb)
    chart = slope_chart(cone, reeb, y)
    si, sj = profile.s[cone.index(i)], profile.s[cone.index(i + 1)]
    if si == 0 or sj == 0:
        raise PreconditionError("slope change is only defined between non-flat faces")
    return -det3(cone[i], cone[i + 1], reeb.value) / (chart.delta * si * sj)


def check_slope_law(cone: GoodCone, reeb: ReebVector, y: Sequence[int]) -> None:
    chart = slope_chart(cone, reeb, y)
    size = len(cone)
    for i in range(size):
        a, b = chart.slopes[i], chart.slopes[(i + 1) % size]
        if a is None or b is None:
            continue
        law = slope_change(cone, reeb, y, i)
        if a - b != law:
            raise IdentityViolation(
                f"slope change at vertex {i} disagrees with the determinant law",
                [{"vertex": i, "direct": str(a - b), "law": str(law)}],
            )


def _flat_neighbours(cone: GoodCone, profile: IsotropyProfile, beta: int):
    beta = cone.index(beta)
    if beta not in profile.flats:
        raise PreconditionError(f"face {beta} is not flat")
    return beta, profile.s[cone.index(beta - 1)], profile.s[cone.index(beta + 1)]


def flat_chord(cone: GoodCone, reeb: ReebVector, beta: int) -> QuadNumber:
    """Chord of the flat face segment measured along v0."""
    profile = isotropy_profile(cone, reeb)
    beta, _, _ = _flat_neighbours(cone, profile, beta)
    polygon = moment_polygon(cone, reeb)
    v0 = profile.v0
    chord = dot(vsub(polygon.vertices[beta - 1], polygon.vertices[beta]), v0) / dot(v0, v0)
    return abs(chord)


def width_of_flat_face(cone: GoodCone, reeb: ReebVector, y: Sequence[int], beta: int) -> QuadNumber:
    profile = isotropy_profile(cone, reeb)
    beta, s_prev, s_next = _flat_neighbours(cone, profile, beta)
    chart = slope_chart(cone, reeb, y)
    c = levels(cone, reeb, y)[beta]
    w = vsub(tuple(c * x for x in reeb.value), y)
    width = abs(-det3(cone[beta - 1], cone[beta + 1], w) / (chart.delta * s_prev * s_next))

    chord = flat_chord(cone, reeb, beta)
    if width != chord:
        raise IdentityViolation(
            f"width of flat face {beta} disagrees with its chord",
            [{"face": beta, "determinant": str(width), "chord": str(chord)}],
        )
    return width


def closure_terms(cone: GoodCone, reeb: ReebVector, y: Sequence[int]) -> list[dict]:
    """Terms of the polygon closure identity, which sum to zero for Y in Lie(G)."""
    profile = isotropy_profile(cone, reeb)
    s = profile.s
    size = len(cone)
    terms = []
    for i in range(size):
        j = (i + 1) % size
        if s[i] and s[j]:
            value = Fraction(det3(cone[i], cone[j], y), s[i] * s[j])
            terms.append({"kind": "vertex", "index": i, "value": value})
    for beta in profile.flats:
        a, b = (beta - 1) % size, (beta + 1) % size
        value = Fraction(det3(cone[a], cone[b], y), s[a] * s[b])
        terms.append({"kind": "flat", "index": beta, "value": value})
    return terms


def check_closure(cone: GoodCone, reeb: ReebVector, y: Sequence[int]) -> None:
    if dot(y, isotropy_profile(cone, reeb).v0) != 0:
        raise PreconditionError("Y does not lie in Lie(G)")
    terms = closure_terms(cone, reeb, y)
    total = sum((t["value"] for t in terms), Fraction(0))
    if total != 0:
        raise IdentityViolation(f"polygon closure sums to {total}", terms)


def vertex_level_check(cone: GoodCone, reeb: ReebVector, y: Sequence[int]) -> None:
    """det3(n^i, n^{i+1}, Y - ⟨Y, P_i⟩ R) vanishes at every vertex."""
    values = levels(cone, reeb, y)
    for i, c in enumerate(values):
        w = vsub(y, tuple(c * x for x in reeb.value))
        if det3(cone[i], cone[i + 1], w) != 0:
            raise IdentityViolation(f"vertex {i} is off its level line", [{"vertex": i}])
