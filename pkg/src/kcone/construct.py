"""Explicit good cones: the RP^3 family, obstructed chains and chain closure."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence
import math
import random

import structlog

from .cone import GoodCone, gluing_ce, validate
from .errors import IdentityViolation, PreconditionError, SearchExhaustedError, ValidityError
from .exactnum import (
    DISCRIMINANT,
    Vec3Z,
    box_pairs,
    combine,
    cross,
    cross_primitive,
    det2,
    det3,
    is_delzant_pair,
    plane_lattice_basis,
    plane_point,
    vadd,
)
from .reeb import ReebVector, require_admissible

logger = structlog.get_logger(__name__)


CLOSE_BOX = 64
DEFAULT_SEED = 0


@dataclass(slots=True, frozen=True)
class Family:
    cone: GoodCone
    reeb: ReebVector
    name: str


def _family_reeb(cone: GoodCone, last: int, d: int) -> ReebVector:
    reeb = ReebVector(cone[0], cone[last], d)
    require_admissible(cone, reeb)
    return reeb


def example_family(k: int, d: int = DISCRIMINANT) -> Family:
    """n^i = (1, i, i^2 - i + 1) for 0 <= i <= k+1, closed by (1, 1, k+2).

    Every face strictly between the two flats is an RP^3 with trivial normal
    bundle that cannot be blown down.
    """
    if k < 2:
        raise PreconditionError(f"family needs k >= 2, got {k}")
    normals = [(1, i, i * i - i + 1) for i in range(k + 2)]
    normals.append((1, 1, k + 2))
    cone = GoodCone(tuple(normals))  # type: ignore[arg-type]
    report = validate(cone)
    if not report.is_good:
        raise ValidityError(f"example family k={k} is not good", report)
    return Family(cone, _family_reeb(cone, k + 1, d), f"example-k{k}")


def _third(v: Sequence[int]) -> int:
    return v[2]


def obstructed_family(k: int, seed: int = DEFAULT_SEED, d: int = DISCRIMINANT) -> Family:
    """A chain of k lens spaces none of which blows down to a closed orbit.

    Each step sets n^{s+1} = a n^{s-1} + 2 l^{s-1} + e n^s with a odd negative and
    e even positive, so consecutive gluing data (c, e) always share the factor 2.
    """
    if k < 2:
        raise PreconditionError(f"family needs k >= 2, got {k}")
    rng = random.Random(seed)
    n0 = (1, 0, 1)
    normals: list[Vec3Z] = [n0, (1, 1, 1)]
    l_prev: Vec3Z = (0, 0, 1)
    c = 2

    for s in range(1, k + 1):
        n_prev, n_cur = normals[s - 1], normals[s]
        a = -(2 * rng.randrange(4) + 1)
        e = 2 * rng.randrange(1, 5)
        # coefficient of a is negative by the induction hypothesis
        while a * _third(cross(n_cur, n_prev)) + c * _third(cross(n_cur, l_prev)) <= 0:
            a = 2 * a - 1
        while (
            a * _third(cross(n0, n_prev)) + c * _third(cross(n0, l_prev)) + e * _third(cross(n0, n_cur))
            <= 0
        ):
            e *= 2

        n_next = combine((a, c, e), (n_prev, l_prev, n_cur))
        # ad - bc = -1 keeps det3(n^s, n^{s+1}, l^s) = 1
        l_next = combine(((a + 1) // 2, 1), (n_prev, l_prev))
        if det3(n_cur, n_next, l_next) != 1:
            raise IdentityViolation(f"step {s} lost the Delzant witness", [{"a": a, "e": e}])
        logger.debug("obstructed step", s=s, a=a, e=e, normal=n_next)
        normals.append(n_next)  # type: ignore[arg-type]
        l_prev = l_next  # type: ignore[assignment]

    t = close_chain(normals)
    cone = GoodCone(tuple(normals) + (t,))
    failures = obstruction_failures(cone)
    if failures:
        raise IdentityViolation(f"obstructed family k={k} misses {len(failures)} conditions", failures)
    logger.info("obstructed family", k=k, seed=seed, closing=t)
    return Family(cone, _family_reeb(cone, k + 1, d), f"obstructed-k{k}-s{seed}")


def obstruction_failures(cone: GoodCone) -> list[dict]:
    """Conditions a cone (n^0, ..., n^{k+2}) needs for an unremovable chain of length k."""
    n = list(cone)
    k = len(n) - 3
    failures: list[dict] = []

    def check(cond: str, ok: bool, **where):
        if not ok:
            failures.append({"condition": cond, **where})

    for i in range(1, k + 2):
        check("i", _third(cross(n[0], n[i])) > 0, i=i)
    for i in range(k + 1):
        check("ii", _third(cross(n[i], n[i + 1])) > 0, i=i)
    for i in range(k):
        check("iii", det3(n[i], n[i + 1], n[i + 2]) > 0, i=i)
    for j in range(k + 1):
        check("iv", det3(n[k + 1], n[k + 2], n[j]) > 0, j=j)
    for j in range(1, k + 2):
        check("iv", det3(n[k + 2], n[0], n[j]) > 0, j=j)
    for i in range(k + 3):
        check("v", is_delzant_pair(cone[i], cone[i + 1]), i=i)
    if not failures:
        for i in range(k):
            c, e = gluing_ce(cone, i)
            check("vi", math.gcd(c, e) != 1, i=i, c=c, e=e)
    return failures


def _in_closing_cone(chain: Sequence[Vec3Z], t: Sequence[int]) -> bool:
    first, last = chain[0], chain[-1]
    return all(det3(last, t, n) > 0 for n in chain[:-1]) and all(det3(t, first, n) > 0 for n in chain[1:])


def close_chain(normals: Sequence[Sequence[int]], box: int = CLOSE_BOX) -> Vec3Z:
    """A normal t on the slice v0·t = 1 closing the chain into a good cone.

    v0 is the primitive normal of span(first, last), so (last, t) and (t, first)
    are Delzant pairs for every such t.
    """
    chain: tuple[Vec3Z, ...] = tuple(tuple(int(a) for a in n) for n in normals)  # type: ignore[misc]
    if len(chain) < 2:
        raise PreconditionError("a chain needs at least two normals")
    for i in range(len(chain) - 1):
        if not is_delzant_pair(chain[i], chain[i + 1]):
            raise PreconditionError(f"chain normals {i}, {i + 1} are not a Delzant pair")
        for j, m in enumerate(chain):
            if j not in (i, i + 1) and det3(chain[i], chain[i + 1], m) <= 0:
                raise PreconditionError(f"chain is not convex at faces {i}, {i + 1} against {j}")

    first, last = chain[0], chain[-1]
    v0 = cross_primitive(first, last)
    base = plane_point(v0, 1)
    u1, u2 = plane_lattice_basis(v0)

    def candidates() -> Iterator[Vec3Z]:
        for a, b in box_pairs(box):
            yield combine((1, a, b), (base, u1, u2))  # type: ignore[misc]
        # first + last lies inside the cone on the slice v0·t = 0; push the slice
        # point along it until a ball around it fits
        w = vadd(first, last)
        for j in range(box):
            yield combine((2**j, 1), (w, base))  # type: ignore[misc]

    tried = 0
    for t in candidates():
        if not _in_closing_cone(chain, t):
            continue
        tried += 1
        if validate(GoodCone(chain + (t,))).is_good:
            logger.debug("closed chain", length=len(chain), t=t, tried=tried)
            return t
    raise SearchExhaustedError(
        f"no closing normal within box {box}", box=box, v0=v0, tried=tried
    )


def weighted_homogeneous_check(exponents: Sequence[Sequence[int]], w: Sequence[int], d: int) -> bool:
    """Every monomial z^a satisfies w·a = d."""
    if not exponents:
        raise PreconditionError("no monomials")
    if any(len(a) != len(w) for a in exponents):
        raise PreconditionError(f"exponent vectors must have length {len(w)}")
    return all(sum(wi * ai for wi, ai in zip(w, a)) == d for a in exponents)


def bihomogeneous_check(
    exponents: Sequence[Sequence[int]], w: Sequence[int], d: int, w2: Sequence[int], d2: int
) -> bool:
    """Homogeneous for two non-parallel weight vectors at once."""
    if len(w) != len(w2):
        raise PreconditionError("weight vectors differ in length")
    if all(det2((w[i], w2[i]), (w[j], w2[j])) == 0 for i in range(len(w)) for j in range(i + 1, len(w))):
        raise PreconditionError(f"second weight {tuple(w2)} is parallel to {tuple(w)}")
    return weighted_homogeneous_check(exponents, w, d) and weighted_homogeneous_check(exponents, w2, d2)
