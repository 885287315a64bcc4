from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Literal, Sequence
import functools
import hashlib
import itertools
import json
import math

import structlog

from .cone import GoodCone, edge_rays, require_good, validate, witness
from .errors import (
    BlowdownImpossible,
    DegenerateInputError,
    IntegrityError,
    NoProgressionError,
    PreconditionError,
    RankError,
    SearchExhaustedError,
    ValidityError,
)
from .exactnum import (
    QuadNumber,
    Vec3Z,
    box_pairs,
    combine,
    delzant_witness,
    det3,
    dot,
    is_delzant_pair,
    is_primitive,
    plane_lattice_basis,
    plane_point,
    prime_in_progression,
)

logger = structlog.get_logger(__name__)


BLOWDOWN_BOX = 64
HEIGHT_BOUND = 64
PROGRESSION_TRIES = 8


def cone_hash(cone: GoodCone) -> str:
    payload = json.dumps([list(n) for n in cone], separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


@dataclass(slots=True, frozen=True)
class SurgeryResult:
    cone: GoodCone
    kind: Literal["orbit", "lens"]
    index: int
    diagnostics: dict[str, Any] = field(default_factory=dict, compare=False)


def _checked(normals: Iterable[Sequence[int]], what: str) -> GoodCone:
    cone = GoodCone(tuple(normals))  # type: ignore[arg-type]
    report = validate(cone)
    if not report.is_good:
        raise ValidityError(f"{what} does not give a good cone", report)
    return cone


def cut(cone: GoodCone, t: Sequence[int]) -> SurgeryResult:
    """Truncate the cone by the half-space {t·v >= 0}.

    Cutting off one vertex is an orbit blow-up (t is inserted after n^i);
    cutting off both vertices of face i is a lens blow-up (t replaces n^i).
    """
    require_good(cone)
    t = tuple(int(a) for a in t)
    if not is_primitive(t):
        raise PreconditionError(f"cutting normal {t} is not primitive")

    pairings = [dot(t, e) for e in edge_rays(cone)]
    if 0 in pairings:
        raise DegenerateInputError(f"cut through vertex {pairings.index(0)}")
    removed = [i for i, x in enumerate(pairings) if x < 0]
    size = len(cone)

    if not removed:
        raise DegenerateInputError("cut removes no vertex")
    if len(removed) == 1:
        (i,) = removed
        normals = list(cone.normals)
        normals.insert(i + 1, t)
        result = SurgeryResult(_checked(normals, "orbit blow-up"), "orbit", i)
    elif len(removed) == 2:
        a, b = removed
        if (a + 1) % size == b:
            i = b
        elif (b + 1) % size == a:
            i = a
        else:
            raise PreconditionError(f"cut removes non-adjacent vertices {removed}")
        normals = list(cone.normals)
        normals[i] = t
        result = SurgeryResult(_checked(normals, "lens blow-up"), "lens", i)
    else:
        raise PreconditionError(f"cut removes vertices {removed}, not a local surgery")

    logger.info("cut", kind=result.kind, index=result.index, t=t)
    return result


def blowdown_delete(cone: GoodCone, i: int) -> GoodCone:
    require_good(cone)
    i = cone.index(i)
    normals = cone.normals[:i] + cone.normals[i + 1 :]
    candidate = GoodCone(normals)
    report = validate(candidate)
    if not report.is_good:
        raise BlowdownImpossible(f"face {i} cannot be blown down", report)
    return candidate


def _contiguous(cone: GoodCone, indices: Sequence[int]) -> list[int]:
    idx = [cone.index(i) for i in indices]
    if not idx or len(idx) >= len(cone) or len(set(idx)) != len(idx):
        raise PreconditionError(f"range {list(indices)} is not a proper range of faces")
    for a, b in zip(idx, idx[1:]):
        if (a + 1) % len(cone) != b:
            raise PreconditionError(f"range {list(indices)} is not contiguous")
    return idx


def replace_range(cone: GoodCone, indices: Sequence[int], t: Sequence[int]) -> GoodCone:
    """Replace a contiguous range of normals by t; the new cone must contain the old one."""
    require_good(cone)
    idx = _contiguous(cone, indices)
    t = tuple(int(a) for a in t)
    if any(dot(t, e) < 0 for e in edge_rays(cone)):
        raise PreconditionError(f"replacing faces {idx} by {t} cuts into the cone")
    normals = []
    for j, n in enumerate(cone):
        if j == idx[0]:
            normals.append(t)
        elif j not in idx:
            normals.append(n)
    if len(normals) < 3:
        raise DegenerateInputError("replacement leaves fewer than 3 faces")
    return _checked(normals, f"replacing faces {idx}")


def orbit_blowup_normal(cone: GoodCone, i: int, box: int = BLOWDOWN_BOX) -> Vec3Z:
    """A normal t = x n^i + y n^{i+1} - l^i (x, y >= 1) whose cut blows up vertex i only."""
    require_good(cone)
    n, m, l = cone[i], cone[i + 1], witness(cone, i)
    for x, y in sorted(itertools.product(range(1, box + 1), repeat=2), key=lambda p: (max(p), p)):
        t = combine((x, y, -1), (n, m, l))
        try:
            if cut(cone, t).kind != "orbit":
                continue
        except (ValidityError, DegenerateInputError, PreconditionError):
            continue
        return t  # type: ignore[return-value]
    raise SearchExhaustedError(f"no orbit blow-up at vertex {cone.index(i)} within box {box}", box=box)


def in_theta(prev: Sequence[int], mid: Sequence[int], nxt: Sequence[int], t: Sequence[int]) -> bool:
    """t lies in the open cone beyond face ``mid`` between its two neighbours."""
    return det3(prev, mid, t) > 0 and det3(mid, nxt, t) > 0 and det3(prev, nxt, t) < 0


def _progression_candidates(x: Vec3Z, y: Vec3Z, nxt: Vec3Z) -> Iterator[Vec3Z]:
    """Candidates t = s1 x + s2 y + z with s1 b - n1 a prime not dividing s2 b - n2.

    (n1, n2, b) are the coordinates of the next normal in the basis (x, y, z)
    with det3(x, y, z) = 1, which makes (t, next) a Delzant pair.
    """
    z = delzant_witness(x, y)
    if z is None:
        return
    b = det3(x, y, nxt)
    n1, n2 = det3(nxt, y, z), det3(x, nxt, z)
    s1_min = math.ceil(max(1, -Fraction(det3(y, nxt, z), b) + 1))
    s2_min = math.ceil(max(1, Fraction(n2, b) + 1))

    lower = s1_min * b - n1
    for _ in range(PROGRESSION_TRIES):
        try:
            p = prime_in_progression((-n1) % b, b, max(lower, 2))
        except NoProgressionError:
            return
        s1 = (p + n1) // b
        for s2 in (s2_min, s2_min + 1, s1, s1 + 1):
            if s2 >= s2_min and (s2 * b - n2) % p:
                yield combine((s1, s2, 1), (x, y, z))  # type: ignore[misc]
        lower = p + 1


def _box_candidates(x: Vec3Z, y: Vec3Z, z: Vec3Z, box: int) -> Iterator[Vec3Z]:
    for h in (1, 2, 3):
        for s1, s2 in box_pairs(box):
            t = combine((s1, s2, h), (x, y, z))
            if is_primitive(t):
                yield t  # type: ignore[misc]


def _search_theta(
    cone: GoodCone,
    i: int,
    accept: Callable[[Vec3Z], bool],
    box: int,
    progression: bool = True,
) -> Vec3Z | None:
    prev, mid, nxt = cone[i - 1], cone[i], cone[i + 1]
    z = witness(cone, i - 1)
    sources = [_box_candidates(prev, mid, z, box)]
    if progression:
        sources.insert(0, _progression_candidates(prev, mid, nxt))

    tried = 0
    for t in itertools.chain(*sources):
        if not in_theta(prev, mid, nxt, t):
            continue
        if not (is_delzant_pair(prev, t) and is_delzant_pair(t, nxt)):
            continue
        tried += 1
        if accept(t):
            logger.debug("theta search", face=cone.index(i), t=t, tried=tried)
            return t
    logger.info("theta search exhausted", face=cone.index(i), tried=tried, box=box)
    return None


def _accepts_replacement(cone: GoodCone, i: int) -> Callable[[Vec3Z], bool]:
    def accept(t: Vec3Z) -> bool:
        try:
            replace_range(cone, [i], t)
        except (ValidityError, PreconditionError):
            return False
        return True

    return accept


def find_blowdown_normal(
    cone: GoodCone,
    i: int,
    constraint: tuple[Sequence[int], int] | None = None,
    box: int = BLOWDOWN_BOX,
) -> Vec3Z | None:
    """A normal t beyond face i so that replacing n^i by t gives a good cone.

    With ``constraint = (v0, value)`` the search runs on the slice v0·t = value.
    """
    require_good(cone)
    accept = _accepts_replacement(cone, i)
    if constraint is None:
        return _search_theta(cone, i, accept, box)

    v0, value = tuple(constraint[0]), int(constraint[1])
    base = plane_point(v0, value)
    u1, u2 = plane_lattice_basis(v0)
    prev, mid, nxt = cone[i - 1], cone[i], cone[i + 1]
    tried = 0
    for a, b in box_pairs(box):
        t = combine((1, a, b), (base, u1, u2))
        if not is_primitive(t) or not in_theta(prev, mid, nxt, t):
            continue
        tried += 1
        if accept(t):  # type: ignore[arg-type]
            logger.debug("constrained theta search", face=cone.index(i), t=t, tried=tried)
            return t  # type: ignore[return-value]
    logger.info("constrained search exhausted", face=cone.index(i), v0=v0, value=value, tried=tried, box=box)
    return None


@dataclass(slots=True, frozen=True)
class PlanStep:
    op: Literal["cut", "delete", "replace"]
    params: dict[str, Any] = field(hash=False)
    pre: str = ""
    post: str = ""


@dataclass(slots=True, frozen=True)
class SurgeryPlan:
    start: str
    steps: tuple[PlanStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)


def apply_step(cone: GoodCone, step: PlanStep) -> GoodCone:
    if step.op == "cut":
        return cut(cone, step.params["t"]).cone
    if step.op == "delete":
        return blowdown_delete(cone, step.params["i"])
    if step.op == "replace":
        return replace_range(cone, step.params["range"], step.params["t"])
    raise PreconditionError(f"unknown plan operation {step.op!r}")


def replay(cone: GoodCone, plan: SurgeryPlan) -> GoodCone:
    """Re-run a plan, checking every recorded hash."""
    if cone_hash(cone) != plan.start:
        raise IntegrityError("plan does not start from this cone")
    for n, step in enumerate(plan.steps):
        if cone_hash(cone) != step.pre:
            raise IntegrityError(f"step {n} pre-hash mismatch")
        cone = apply_step(cone, step)
        if cone_hash(cone) != step.post:
            raise IntegrityError(f"step {n} post-hash mismatch")
    return cone


def _removed_range(cone: GoodCone, keep: Iterable[int]) -> list[int]:
    keep = {cone.index(i) for i in keep}
    if not keep:
        raise PreconditionError("nothing to keep")
    removed = [i for i in range(len(cone)) if i not in keep]
    if not removed:
        return []
    # rotate so the range starts right after a kept face
    start = next(i for i in removed if (i - 1) % len(cone) in keep)
    run = [(start + j) % len(cone) for j in range(len(removed))]
    if set(run) != set(removed):
        raise PreconditionError("kept faces must leave a contiguous range")
    return run


def plan_blowdown_sequence(cone: GoodCone, keep: Iterable[int], box: int = BLOWDOWN_BOX) -> SurgeryPlan:
    """Merge the faces outside ``keep`` into a single face.

    Peels from the low end of the removed range: replace r1 by a normal t
    beyond it, then delete r2, until one face is left.
    """
    require_good(cone)
    start = cone_hash(cone)
    run = [cone[i] for i in _removed_range(cone, keep)]
    steps: list[PlanStep] = []

    while len(run) >= 2:
        p = cone.normals.index(run[0])

        def accept(t: Vec3Z, cone=cone, p=p) -> bool:
            try:
                blowdown_delete(replace_range(cone, [p], t), p + 1)
            except (ValidityError, PreconditionError):
                return False
            return True

        t = _search_theta(cone, p, accept, box, progression=False)
        if t is None:
            raise SearchExhaustedError(
                f"cannot merge faces {run[0]} and {run[1]}", step=len(steps), faces=run, box=box
            )

        replaced = replace_range(cone, [p], t)
        steps.append(PlanStep("replace", {"range": [p], "t": list(t)}, cone_hash(cone), cone_hash(replaced)))
        q = replaced.index(p + 1)
        merged = blowdown_delete(replaced, q)
        steps.append(PlanStep("delete", {"i": q}, cone_hash(replaced), cone_hash(merged)))
        logger.debug("plan step", merged=run[1], into=t, remaining=len(run) - 1)

        cone = merged
        run = [t] + run[2:]

    plan = SurgeryPlan(start, tuple(steps))
    logger.info("blow-down plan", steps=len(plan))
    return plan


@dataclass(slots=True, frozen=True)
class LocalBlowupSolution:
    l: QuadNumber
    u: int
    v: int
    r1: QuadNumber
    r2: QuadNumber
    a0: int
    a1: int
    a2: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.u, self.v)


@functools.cache
def _heights(bound: int) -> list[tuple[int, int]]:
    pairs = [
        (u, v)
        for v in range(1, bound + 1)
        for u in range(-bound, bound + 1)
        if math.gcd(u, v) == 1
    ]
    return sorted(pairs, key=lambda p: (max(abs(p[0]), p[1]), abs(p[0]), p[0], p[1]))


def solve_local_blowup(
    lam0: QuadNumber,
    lam1: QuadNumber,
    m1: int,
    m2: int,
    bound: Fraction | int,
    height: int = HEIGHT_BOUND,
) -> LocalBlowupSolution:
    """Weights of a circle action that blows up a minimal orbit with weights (m1, m2).

    Picks l = lam1 - (u/v) lam0 of least height with gcd(v, m1 m2) = 1 so that
    r_i = l m_i exceed ``bound``; then (a0, a1, a2) = (v, u m1, u m2).
    """
    if m1 == 0 or m2 == 0 or math.gcd(m1, m2) != 1:
        raise PreconditionError(f"weights ({m1}, {m2}) must be nonzero and coprime")
    if m1 * m2 < 0:
        raise PreconditionError("weights of opposite signs cannot both exceed the bound")
    if lam0.is_zero:
        raise PreconditionError("lambda0 must be nonzero")
    if (lam1 / lam0).is_rational:
        raise RankError("lambda0 and lambda1 are rationally dependent")

    bound = Fraction(bound)
    for u, v in _heights(height):
        if math.gcd(v, m1) != 1 or math.gcd(v, m2) != 1:
            continue
        l = lam1 - lam0 * Fraction(u, v)
        r1, r2 = l * m1, l * m2
        if r1 > bound and r2 > bound:
            logger.debug("local blow-up", u=u, v=v, l=str(l))
            return LocalBlowupSolution(l, u, v, r1, r2, v, u * m1, u * m2)

    raise SearchExhaustedError(f"no admissible u/v of height <= {height}", height=height, bound=str(bound))


def can_blowdown_by_multiplicities(k0: int, k1: int, k2: int, l0_is_min: bool, l2_is_max: bool) -> bool:
    if min(k0, k1, k2) < 1:
        raise PreconditionError("multiplicities must be positive")
    return (k0 == k1 == 1 and l2_is_max) or (l0_is_min and k1 == k2 == 1)
