"""Graphs of isotropy data and their classification up to GL(2, Z).

Torus data (directions, finite isotropy generators, the Reeb class) is written
in coordinates of a basis (u1, u2) of Lie(G)_Z = Z^3 ∩ v0^⊥.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence
import json
import math

import networkx as nx
import structlog

from .cone import GoodCone, face_invariants
from .errors import AssemblyError, DegenerateInputError, IdentityViolation, KConeError, PreconditionError
from .exactnum import (
    QuadNumber,
    Vec2Z,
    apply2,
    cross_primitive,
    det2,
    hermite_frame,
    lie_coordinates,
    plane_lattice_basis,
    plane_point,
    vscale,
    vsub,
)
from .reeb import (
    ReebVector,
    choose_transverse_circle,
    isotropy_profile,
    lie_normal,
    level_structure,
)

logger = structlog.get_logger(__name__)


Rows = tuple[tuple[int, int], tuple[int, int]]


def _mod1(x: Fraction) -> Fraction:
    return x - math.floor(x)


def normalize_direction(v: Sequence) -> Vec2Z:
    """Primitive integer direction with its first nonzero coordinate positive."""
    a, b = (Fraction(x) for x in v)
    if a.denominator != 1 or b.denominator != 1:
        raise DegenerateInputError(f"direction {v} is not integral")
    a, b = int(a), int(b)
    g = math.gcd(a, b)
    if g == 0:
        raise DegenerateInputError("zero direction")
    a, b = a // g, b // g
    if a < 0 or (a == 0 and b < 0):
        a, b = -a, -b
    return a, b


@dataclass(slots=True, frozen=True)
class FiniteCyclicSubgroup:
    """Cyclic subgroup of T^2 = R^2/Z^2 given by a generator in (Q/Z)^2."""

    order: int
    generator: tuple[Fraction, Fraction]

    @classmethod
    def of(cls, generator: Sequence) -> FiniteCyclicSubgroup:
        g = tuple(_mod1(Fraction(x)) for x in generator)
        order = math.lcm(*(x.denominator for x in g))
        multiples = (
            tuple(_mod1(j * x) for x in g)
            for j in range(1, order + 1)
            if math.gcd(j, order) == 1
        )
        return cls(order, min(multiples))  # type: ignore[arg-type]

    def transform(self, rows: Rows) -> FiniteCyclicSubgroup:
        return FiniteCyclicSubgroup.of(apply2(rows, self.generator))

    def __str__(self) -> str:
        return f"{self.order}:{self.generator[0]},{self.generator[1]}"


@dataclass(slots=True, frozen=True)
class RegularVertex:
    id: str
    order: int
    direction: Vec2Z

    def label(self) -> str:
        return f"R|{self.order}|{self.direction[0]},{self.direction[1]}"


@dataclass(slots=True, frozen=True)
class FatVertex:
    id: str
    direction: Vec2Z
    seifert: tuple[int, tuple[int, ...]]  # (genus, exceptional multiplicities)
    normal_euler: tuple[int, int]  # (b, f)

    def label(self) -> str:
        genus, mults = self.seifert
        return f"F|{self.direction[0]},{self.direction[1]}|{genus}|{mults}|{self.normal_euler}"


@dataclass(slots=True, frozen=True)
class Edge:
    id: str
    endpoints: tuple[str, str]
    isotropy: FiniteCyclicSubgroup

    def label(self) -> str:
        return f"E|{self.isotropy}"


@dataclass(slots=True, frozen=True)
class GraphChain:
    edges: tuple[str, ...]
    vertices: tuple[str, ...]

    @property
    def is_nontrivial(self) -> bool:
        return bool(self.edges or self.vertices)


@dataclass(slots=True, frozen=True)
class IsotropyGraph:
    regular: tuple[RegularVertex, ...]
    fat: tuple[FatVertex, ...]
    edges: tuple[Edge, ...]
    reeb_class: tuple[QuadNumber, QuadNumber]
    chains: tuple[GraphChain, ...] = field(default=(), compare=False)

    def transform(self, rows: Rows) -> IsotropyGraph:
        """Apply a GL(2, Z) matrix, given by rows, to all torus data."""
        if abs(det2(*rows)) != 1:
            raise PreconditionError("torus automorphism must be unimodular")
        return IsotropyGraph(
            tuple(replace(v, direction=normalize_direction(apply2(rows, v.direction))) for v in self.regular),
            tuple(replace(v, direction=normalize_direction(apply2(rows, v.direction))) for v in self.fat),
            tuple(replace(e, isotropy=e.isotropy.transform(rows)) for e in self.edges),
            apply2(rows, self.reeb_class),  # type: ignore[arg-type]
            self.chains,
        )

    def relabel(self, mapping: dict[str, str]) -> IsotropyGraph:
        return IsotropyGraph(
            tuple(replace(v, id=mapping.get(v.id, v.id)) for v in self.regular),
            tuple(replace(v, id=mapping.get(v.id, v.id)) for v in self.fat),
            tuple(
                replace(e, id=mapping.get(e.id, e.id), endpoints=tuple(mapping.get(x, x) for x in e.endpoints))  # type: ignore[arg-type]
                for e in self.edges
            ),
            self.reeb_class,
            tuple(
                GraphChain(
                    tuple(mapping.get(x, x) for x in c.edges),
                    tuple(mapping.get(x, x) for x in c.vertices),
                )
                for c in self.chains
            ),
        )

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        for v in self.regular + self.fat:
            g.add_node(v.id, label=v.label())
        for e in self.edges:
            if not all(x in g for x in e.endpoints):
                raise PreconditionError(f"edge {e.id} has a missing endpoint")
            g.add_edge(*e.endpoints, key=e.id, label=e.label())
        return g


def _edge_isotropy(n: Sequence[int], s: int, nu: Sequence[int], coords) -> FiniteCyclicSubgroup:
    # n/s - ν lies in Lie(G) and generates G ∩ (circle of n) modulo Lie(G)_Z
    return FiniteCyclicSubgroup.of(coords(vsub(vscale(Fraction(1, s), n), nu)))


def _vertex_direction(n: Sequence[int], m: Sequence[int], v0: Sequence[int], coords) -> Vec2Z:
    e = cross_primitive(n, m)
    return normalize_direction(coords(cross_primitive(e, v0)))


def extract_graph(
    cone: GoodCone, reeb: ReebVector, y: Sequence[int] | None = None) -> IsotropyGraph:
    profile = isotropy_profile(cone, reeb)
    v0, s, k = profile.v0, profile.s, profile.k
    u1, u2 = profile.lie_basis
    size = len(cone)

    def coords(x):
        return lie_coordinates(x, u1, u2, v0)

    def node(j: int) -> str:
        j %= size
        if j in profile.flats:
            return f"f{j}"
        if (j + 1) % size in profile.flats:
            return f"f{(j + 1) % size}"
        return f"v{j}"

    fat = []
    for beta in profile.flats:
        mults = tuple(sorted(x for x in (k[beta - 1], k[(beta + 1) % size]) if x >= 2))
        inv = face_invariants(cone, beta)
        fat.append(FatVertex(f"f{beta}", normalize_direction(coords(cone[beta])), (0, mults), (inv.b, inv.f)))

    regular = []
    for j in range(size):
        if k[j] and k[(j + 1) % size]:
            direction = _vertex_direction(cone[j], cone[j + 1], v0, coords)
            regular.append(RegularVertex(f"v{j}", profile.vertex_orders[j], direction))

    nu = plane_point(v0, 1)
    edges = []
    for i in range(size):
        if k[i] < 2:
            continue
        iso = _edge_isotropy(cone[i], s[i], nu, coords)
        if iso.order != k[i]:
            raise IdentityViolation(f"edge {i} isotropy has order {iso.order}, expected {k[i]}")
        edges.append(Edge(f"e{i}", (node(i - 1), node(i)), iso))

    y = y if y is not None else choose_transverse_circle(cone, reeb)
    levels = level_structure(cone, reeb, y)
    chains = tuple(
        GraphChain(
            tuple(f"e{i}" for i in c.faces if k[i] >= 2),
            tuple(f"v{j}" for j in c.vertices),
        )
        for c in levels.chains
    )

    graph = IsotropyGraph(tuple(regular), tuple(fat), tuple(edges), coords(reeb.value), chains)  # type: ignore[arg-type]
    logger.debug("graph", regular=len(regular), fat=len(fat), edges=len(edges))
    return graph


def reeb_frame(reeb_class: Sequence[QuadNumber]) -> Rows:
    """The unique U ∈ GL(2, Z) putting the Reeb class in Hermite normal position."""
    p = [Fraction(x.rat) for x in reeb_class]
    q = [Fraction(x.irr) for x in reeb_class]
    den = math.lcm(*(x.denominator for x in p + q))
    c1 = tuple(int(x * den) for x in p)
    c2 = tuple(int(x * den) for x in q)
    return hermite_frame(c1, c2)


def _walk(g: nx.MultiGraph, start: str, first: tuple, stop: set[str], used: set) -> tuple[str, ...]:
    """Labels along a trail from ``start`` until a node in ``stop`` or a dead end."""
    word = [g.nodes[start]["label"]]
    node, edge = start, first
    while edge is not None:
        u, v, key = edge
        used.add(key)
        word.append(g.edges[u, v, key]["label"])
        node = v if u == node else u
        word.append(g.nodes[node]["label"])
        if node in stop:
            break
        edge = next(((a, b, kk) for a, b, kk in g.edges(node, keys=True) if kk not in used), None)
    return tuple(word)


def _segment_words(g: nx.MultiGraph) -> list[tuple[str, ...]]:
    """Maximal trails between nodes of degree other than 2, plus bare cycles."""
    special = {n for n in g if g.degree(n) != 2}
    used: set = set()
    words = []
    for n in special:
        if g.degree(n) == 0:
            words.append((g.nodes[n]["label"],))
        for edge in list(g.edges(n, keys=True)):
            if edge[2] in used:
                continue
            word = _walk(g, n, edge, special, used)
            words.append(min(word, word[::-1]))

    for comp in nx.connected_components(g):
        if comp & special:
            continue
        sub = g.subgraph(comp)
        words.append(min(_walk(sub, n, e, set(), set()) for n in sub for e in sub.edges(n, keys=True)))
    return sorted(words)


def canonical_form(graph: IsotropyGraph) -> str:
    """Encoding invariant under relabeling and under GL(2, Z) on torus data."""
    g = graph.transform(reeb_frame(graph.reeb_class))
    payload = {
        "reeb": [str(x) for x in g.reeb_class],
        "segments": _segment_words(g.to_networkx()),
    }
    return json.dumps(payload, separators=(",", ":"))


def isomorphic(g1: IsotropyGraph, g2: IsotropyGraph) -> bool:
    return canonical_form(g1) == canonical_form(g2)


def count_nontrivial_chains(graph: IsotropyGraph) -> int:
    return sum(1 for c in graph.chains if c.is_nontrivial)


def toric_condition_check(
    v_min: Sequence[int],
    v_max: Sequence[int],
    omega: tuple[Sequence[int], Sequence[int]] | None = None,
) -> Vec2Z | None:
    """An integer v in Ω with {v, v_min} and {v, v_max} both bases of Z^2.

    Ω is the open cone spanned by two rays, by default v_min and v_max.
    """
    a, b = tuple(v_min), tuple(v_max)
    if math.gcd(*a) != 1 or math.gcd(*b) != 1:
        raise PreconditionError("v_min and v_max must be primitive")
    if det2(a, b) == 0:
        raise DegenerateInputError("v_min and v_max are parallel")
    r1, r2 = omega if omega is not None else (a, b)
    if det2(r1, r2) == 0:
        raise DegenerateInputError("Ω rays are parallel")

    def inside(v) -> bool:
        # v = α r1 + β r2 with α, β > 0
        d = det2(r1, r2)
        return det2(v, r2) * d > 0 and det2(r1, v) * d > 0

    found = []
    for e1 in (1, -1):
        for e2 in (1, -1):
            # det2(v, a) = e1 and det2(v, b) = e2
            d = a[1] * (-b[0]) - (-a[0]) * b[1]
            x = Fraction(e1 * (-b[0]) - (-a[0]) * e2, d)
            y = Fraction(a[1] * e2 - b[1] * e1, d)
            if x.denominator != 1 or y.denominator != 1:
                continue
            v = (int(x), int(y))
            for w in (v, (-v[0], -v[1])):
                if inside(w) and w not in found:
                    found.append(w)

    if not found:
        logger.info("toric condition fails", v_min=a, v_max=b)
        return None
    return min(found, key=lambda v: (max(abs(v[0]), abs(v[1])), v))


@dataclass(slots=True, frozen=True)
class GermOfChain:
    """Face normals running from one flat face to another, with the Reeb vector."""

    normals: tuple[tuple[int, int, int], ...]
    reeb: ReebVector

    def __post_init__(self):
        object.__setattr__(self, "normals", tuple(tuple(int(a) for a in n) for n in self.normals))
        if len(self.normals) < 3:
            raise AssemblyError("a germ needs two flat ends and at least one face between")
        v0 = lie_normal(self.reeb)
        ends = (self.normals[0], self.normals[-1])
        if any(sum(a * b for a, b in zip(v0, n)) != 0 for n in ends):
            raise AssemblyError("germ ends are not flat")


def germ_of_chain(cone: GoodCone, reeb: ReebVector, start: int, stop: int) -> GermOfChain:
    """Faces start, start+1, ..., stop (cyclic) of a cone between two flats."""
    profile = isotropy_profile(cone, reeb)
    start, stop = cone.index(start), cone.index(stop)
    if start not in profile.flats or stop not in profile.flats:
        raise AssemblyError(f"faces {start} and {stop} are not both flat")
    length = (stop - start) % len(cone) + 1
    return GermOfChain(tuple(cone[start + j] for j in range(length)), reeb)


@dataclass(slots=True, frozen=True)
class LensBundle:
    """Generic fiber data shared by the germs of a fiber sum."""

    genus: int
    reeb_class: tuple[QuadNumber, QuadNumber]
    min_direction: Vec2Z
    max_direction: Vec2Z
    min_normal: tuple[int, int]
    max_normal: tuple[int, int]


def lens_bundle_of(graph: IsotropyGraph) -> LensBundle:
    if len(graph.fat) != 2:
        raise AssemblyError(f"a lens bundle needs two fat vertices, got {len(graph.fat)}")
    lo, hi = graph.fat
    return LensBundle(lo.seifert[0], graph.reeb_class, lo.direction, hi.direction, lo.normal_euler, hi.normal_euler)


def _germ_frame(bundle: LensBundle, germ_class: Sequence[QuadNumber]) -> Rows:
    """Integer U with U (germ Reeb class) = bundle Reeb class."""
    bp = [x.rat for x in bundle.reeb_class]
    bq = [x.irr for x in bundle.reeb_class]
    gp = [x.rat for x in germ_class]
    gq = [x.irr for x in germ_class]
    det = gp[0] * gq[1] - gq[0] * gp[1]
    if det == 0:
        raise AssemblyError("germ Reeb class has rank 1")
    # inverse of the matrix with columns gp, gq
    inv = ((gq[1] / det, -gq[0] / det), (-gp[1] / det, gp[0] / det))
    rows = tuple(
        tuple(bp[r] * inv[0][c] + bq[r] * inv[1][c] for c in range(2)) for r in range(2)
    )
    if any(Fraction(x).denominator != 1 for row in rows for x in row):
        raise AssemblyError("germ fiber is not isomorphic to the bundle fiber")
    rows = tuple(tuple(int(x) for x in row) for row in rows)
    if abs(det2(*rows)) != 1:
        raise AssemblyError("germ fiber is not isomorphic to the bundle fiber")
    return rows  # type: ignore[return-value]


def assemble_fiber_sum(bundle: LensBundle, germs: Iterable[GermOfChain]) -> IsotropyGraph:
    """Isotropy graph of the fiber sum of a lens space bundle along germs of chains."""
    from .construct import close_chain

    regular: list[RegularVertex] = []
    edges: list[Edge] = []
    chains: list[GraphChain] = []
    incident: dict[str, list[int]] = {"fmin": [], "fmax": []}
    min_direction = normalize_direction(bundle.min_direction)
    max_direction = normalize_direction(bundle.max_direction)

    for n, germ in enumerate(germs):
        if germ.reeb.d != bundle.reeb_class[0].d:
            raise AssemblyError(f"germ {n} uses a different discriminant")
        try:
            close_chain(germ.normals)
        except KConeError as exc:
            raise AssemblyError(f"germ {n} is not realizable: {exc}") from exc

        normals, reeb = germ.normals, germ.reeb
        last = len(normals) - 1
        v0 = lie_normal(reeb)
        u1, u2 = plane_lattice_basis(v0)
        nu = plane_point(v0, 1)
        s = [sum(a * b for a, b in zip(v0, x)) for x in normals]
        if 0 in s[1:last]:
            raise AssemblyError(f"germ {n} has a flat face between its ends")

        def coords(x):
            return lie_coordinates(x, u1, u2, v0)

        rows = _germ_frame(bundle, coords(reeb.value))
        ends = tuple(normalize_direction(apply2(rows, coords(normals[j]))) for j in (0, last))
        if ends == (min_direction, max_direction):
            first, second = "fmin", "fmax"
        elif ends == (max_direction, min_direction):
            first, second = "fmax", "fmin"
        else:
            raise AssemblyError(f"germ {n} fat directions do not match the bundle")

        def node(j: int) -> str:
            return first if j == 0 else second if j == last - 1 else f"g{n}.v{j}"

        germ_edges, germ_vertices = [], []
        for i in range(1, last):
            if abs(s[i]) < 2:
                continue
            iso = _edge_isotropy(normals[i], s[i], nu, coords).transform(rows)
            edge = Edge(f"g{n}.e{i}", (node(i - 1), node(i)), iso)
            germ_edges.append(edge.id)
            edges.append(edge)
            for x in edge.endpoints:
                if x in incident:
                    incident[x].append(iso.order)
        for j in range(1, last - 1):
            order = math.gcd(s[j], s[j + 1])
            direction = _vertex_direction(normals[j], normals[j + 1], v0, coords)
            vertex = RegularVertex(node(j), order, normalize_direction(apply2(rows, direction)))
            germ_vertices.append(vertex.id)
            regular.append(vertex)
        chains.append(GraphChain(tuple(germ_edges), tuple(germ_vertices)))

    fat = (
        FatVertex("fmin", min_direction, (bundle.genus, tuple(sorted(incident["fmin"]))), bundle.min_normal),
        FatVertex("fmax", max_direction, (bundle.genus, tuple(sorted(incident["fmax"]))), bundle.max_normal),
    )
    logger.info("fiber sum", germs=len(chains), edges=len(edges))
    return IsotropyGraph(tuple(regular), fat, tuple(edges), bundle.reeb_class, tuple(chains))
