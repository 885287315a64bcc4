"""Euler numbers of Seifert fibrations coming from locally free circle actions.

Every value is an exact ``Fraction``. Orientation conventions: the level set just
above a minimum carries a negative vertex contribution, the one just below a
maximum a positive one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence
import math

import structlog

from .cone import GoodCone, edge_ray
from .errors import DegenerateInputError, IdentityViolation, PreconditionError
from .exactnum import cross_primitive, det2, det3, dot, lie_coordinates
from .reeb import IsotropyProfile, ReebVector, isotropy_profile, level_structure

logger = structlog.get_logger(__name__)


def euler_s3(m1: int, m2: int) -> Fraction:
    if m1 == 0 or m2 == 0:
        raise DegenerateInputError("weights of a locally free action on S^3 are nonzero")
    return Fraction(-math.gcd(m1, m2), m1 * m2)


def euler_quotient(a0: int, a1: int, a2: int, b0: int, b1: int, b2: int) -> Fraction:
    if a0 <= 0:
        raise PreconditionError(f"a0 must be positive, got {a0}")
    den = (a0 * b1 - a1 * b0) * (a0 * b2 - a2 * b0)
    if den == 0:
        raise DegenerateInputError("the torus action data is not effective")
    return Fraction(-a0, den)


def euler_lens(p: int, q: int, m1: int, m2: int) -> Fraction:
    if p < 1 or math.gcd(p, q) != 1:
        raise PreconditionError(f"L({p}, {q}) is not a lens space")
    den = m1 * (p * m1 - q * m2)
    if den == 0:
        raise DegenerateInputError("subaction is not locally free")
    return Fraction(-p * math.gcd(m1, m2), den)


def covering_lens(p: int, q: int, m1: int, m2: int) -> Fraction:
    """Factor c with euler_lens(p, q, m1, m2) = c * euler_s3(m1, p m1 - q m2)."""
    m2_up = p * m1 - q * m2
    return Fraction(p * math.gcd(m1, m2), math.gcd(m1, m2_up))


def covering_quotient(a0: int, a1: int, a2: int, b0: int, b1: int, b2: int) -> Fraction:
    """Factor c with euler_quotient(...) = c * euler_s3(a0 b1 - a1 b0, a0 b2 - a2 b0)."""
    w1, w2 = a0 * b1 - a1 * b0, a0 * b2 - a2 * b0
    return Fraction(a0, math.gcd(w1, w2))


def euler_near_B_orbit(a: int, m: int, n: int, is_max: bool) -> Fraction:
    if a < 1 or m < 1 or n < 1:
        raise PreconditionError("intersection number and multiplicities must be positive")
    value = Fraction(a, m * n)
    return value if is_max else -value


def euler_near_B_lens(
    n1: Sequence[int], n2: Sequence[int], y: Sequence[int], k1: int, k2: int, is_max: bool
) -> Fraction:
    if k1 < 1 or k2 < 1:
        raise PreconditionError("multiplicities must be positive")
    value = Fraction(det3(n1, n2, y), k1 * k2)
    return -value if is_max else value


def critical_jump(a: int, k: int, k2: int) -> Fraction:
    if a < 1 or k < 1 or k2 < 1:
        raise PreconditionError("jump data must be positive")
    return Fraction(a, k * k2)


@dataclass(slots=True, frozen=True)
class ChainDescriptor:
    k: tuple[int, ...]
    a: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(self.k))
        object.__setattr__(self, "a", tuple(self.a))
        if not self.k or len(self.a) != len(self.k) - 1:
            raise PreconditionError(f"chain with {len(self.k)} faces needs {len(self.k) - 1} weights")
        if any(x < 1 for x in self.k + self.a):
            raise PreconditionError("chain entries must be positive")


def chain_euler_sum(chain: ChainDescriptor) -> tuple[Fraction, int]:
    total = sum(
        (critical_jump(a, chain.k[i], chain.k[i + 1]) for i, a in enumerate(chain.a)),
        Fraction(0),
    )
    d = total * math.lcm(chain.k[0], chain.k[-1])
    if d.denominator != 1 or d <= 0:
        raise IdentityViolation(
            f"chain sum {total} gives d = {d}", [{"k": chain.k, "a": chain.a, "d": str(d)}]
        )
    return total, int(d)


def vertex_weight(cone: GoodCone, reeb: ReebVector, y: Sequence[int], i: int) -> int:
    """Intersection number of the circle Y with the closed orbit at vertex i.

    Equal to e_i·Y and, independently, to gcd(k_i, k_{i+1}) |det2(Y, Y_Σ)| in
    Lie(G)_Z coordinates where Y_Σ spans Lie(G) ∩ span(n^i, n^{i+1}).
    """
    profile = isotropy_profile(cone, reeb)
    e = edge_ray(cone, i)
    a = dot(e, y)

    u1, u2 = profile.lie_basis
    y_sigma = cross_primitive(e, profile.v0)
    count = abs(det2(lie_coordinates(y, u1, u2, profile.v0), lie_coordinates(y_sigma, u1, u2, profile.v0)))
    if a != profile.vertex_orders[cone.index(i)] * count:
        raise IdentityViolation(
            f"intersection count at vertex {cone.index(i)} disagrees with e·Y",
            [{"vertex": cone.index(i), "pairing": a, "count": str(count)}],
        )
    return a


@dataclass(slots=True, frozen=True)
class ChainTerm:
    chain: int
    d: int | None
    lcm: int
    total: Fraction


@dataclass(slots=True, frozen=True)
class EulerReport:
    lhs: Fraction
    rhs: Fraction
    per_chain: tuple[ChainTerm, ...]
    ok: bool
    terms: tuple[dict[str, Any], ...] = field(default=())


def verify_global_identity(
    cone: GoodCone, reeb: ReebVector, y: Sequence[int], profile: IsotropyProfile | None = None
) -> EulerReport:
    """Compare e(max) - e(min) with the sum of critical jumps along both chains.

    ``profile`` overrides the multiplicities, used to audit tampered data.
    """
    profile = profile or isotropy_profile(cone, reeb)
    levels = level_structure(cone, reeb, y)
    k = profile.k
    terms: list[dict[str, Any]] = []

    lhs = Fraction(0)
    for extreme, is_max in ((levels.minimum, False), (levels.maximum, True)):
        i = extreme.index
        if extreme.kind == "flat":
            value = euler_near_B_lens(
                cone[i + 1], cone[i - 1], y, k[cone.index(i + 1)], k[cone.index(i - 1)], is_max
            )
        else:
            a = vertex_weight(cone, reeb, y, i)
            value = euler_near_B_orbit(a, k[i], k[cone.index(i + 1)], is_max)
        terms.append({"term": "max" if is_max else "min", "kind": extreme.kind, "index": i, "value": value})
        lhs += value if is_max else -value

    rhs = Fraction(0)
    per_chain = []
    ok = True
    for j, chain in enumerate(levels.chains):
        weights = [vertex_weight(cone, reeb, y, v) for v in chain.vertices]
        total = Fraction(0)
        for v, a in zip(chain.vertices, weights):
            jump = critical_jump(a, k[v], k[cone.index(v + 1)])
            terms.append({"term": "jump", "chain": j, "vertex": v, "a": a, "value": jump})
            total += jump
        rhs += total

        if not chain.vertices:
            continue
        lcm = math.lcm(k[chain.faces[0]], k[chain.faces[-1]])
        d = total * lcm
        integral = d.denominator == 1 and d > 0
        ok = ok and integral
        per_chain.append(ChainTerm(j, int(d) if integral else None, lcm, total))

    ok = ok and lhs == rhs
    if not ok:
        logger.warning("euler identity violated", lhs=str(lhs), rhs=str(rhs))
    else:
        logger.debug("euler identity", lhs=str(lhs), chains=len(per_chain))
    return EulerReport(lhs, rhs, tuple(per_chain), ok, tuple(terms))
