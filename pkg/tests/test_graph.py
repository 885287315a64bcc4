from dataclasses import replace
from fractions import Fraction
import math
import random

import pytest

from kcone.errors import AssemblyError, DegenerateInputError
from kcone.exactnum import det2
from kcone.graph import (
    FiniteCyclicSubgroup,
    assemble_fiber_sum,
    canonical_form,
    count_nontrivial_chains,
    extract_graph,
    germ_of_chain,
    isomorphic,
    lens_bundle_of,
    normalize_direction,
    toric_condition_check,
)

from tests.conftest import random_unimodular


def test_cyclic_subgroup_is_canonical():
    a = FiniteCyclicSubgroup.of((Fraction(1, 5), Fraction(2, 5)))
    b = FiniteCyclicSubgroup.of((Fraction(3, 5), Fraction(6, 5)))
    assert a == b
    assert a.order == 5
    assert FiniteCyclicSubgroup.of((Fraction(1, 2), 0)).order == 2


def test_normalize_direction():
    assert normalize_direction((-2, 4)) == (1, -2)
    assert normalize_direction((0, -3)) == (0, 1)


def test_example_graph(k2):
    graph = extract_graph(k2.cone, k2.reeb, (1, 1, 3))
    assert len(graph.fat) == 2
    assert [(v.id, v.order) for v in graph.regular] == [("v1", 2)]
    assert sorted((e.id, e.endpoints, e.isotropy.order) for e in graph.edges) == [
        ("e1", ("f0", "v1"), 2),
        ("e2", ("v1", "f3"), 2),
    ]
    for fat in graph.fat:
        assert fat.seifert == (0, (2,))
    assert count_nontrivial_chains(graph) == 1


def test_simplicial_graph(simplicial, simplicial_reeb):
    graph = extract_graph(simplicial, simplicial_reeb, (1, 1, 1))
    assert graph.fat == ()
    assert len(graph.regular) == 3
    assert [e.id for e in graph.edges] == ["e1"]
    assert count_nontrivial_chains(graph) == 2


def test_canonical_form_ignores_labels_and_torus_frame(k2):
    graph = extract_graph(k2.cone, k2.reeb)
    assert isomorphic(graph, graph.relabel({"v1": "middle", "f0": "bottom"}))
    assert isomorphic(graph, graph.transform(((2, 1), (1, 1))))
    assert isomorphic(graph, graph.transform(((0, 1), (1, 0))))


def test_different_families_are_not_isomorphic(k2, k3):
    assert not isomorphic(extract_graph(k2.cone, k2.reeb), extract_graph(k3.cone, k3.reeb))


def test_graph_is_lattice_invariant(rank2_pairs):
    rng = random.Random(29)
    for n in range(200):
        cone, reeb, y = rank2_pairs[n % len(rank2_pairs)]
        u = random_unimodular(rng)
        moved = extract_graph(cone.transform(u), reeb.transform(u), u.apply(y))
        assert canonical_form(moved) == canonical_form(extract_graph(cone, reeb, y))


def test_chain_count_is_bounded(rank2_pairs):
    for cone, reeb, y in rank2_pairs:
        assert count_nontrivial_chains(extract_graph(cone, reeb, y)) <= 2


@pytest.mark.parametrize(
    "v_min, v_max, expected",
    [((1, 0), (0, 1), (1, 1)), ((1, 0), (1, 2), (1, 1)), ((1, 0), (1, 3), None)],
)
def test_toric_condition(v_min, v_max, expected):
    assert toric_condition_check(v_min, v_max) == expected


def test_toric_condition_rejects_parallel():
    with pytest.raises(DegenerateInputError):
        toric_condition_check((1, 2), (-1, -2))


def _inside(v, r1, r2):
    d = det2(r1, r2)
    return det2(v, r2) * d > 0 and det2(r1, v) * d > 0


def test_toric_condition_agrees_with_brute_force():
    rng = random.Random(31)
    checked = 0
    while checked < 100:
        a = (rng.randint(-6, 6), rng.randint(-6, 6))
        b = (rng.randint(-6, 6), rng.randint(-6, 6))
        if math.gcd(*a) != 1 or math.gcd(*b) != 1 or det2(a, b) == 0:
            continue
        checked += 1
        v = toric_condition_check(a, b)
        brute = [
            (x, y)
            for x in range(-40, 41)
            for y in range(-40, 41)
            if abs(det2((x, y), a)) == 1 and abs(det2((x, y), b)) == 1 and _inside((x, y), a, b)
        ]
        if v is None:
            assert brute == []
        else:
            assert abs(det2(v, a)) == 1 and abs(det2(v, b)) == 1 and _inside(v, a, b)
            assert set(brute) <= set(_all_solutions(a, b))


def _all_solutions(a, b):
    found = []
    for e1 in (1, -1):
        for e2 in (1, -1):
            d = det2(a, b)
            # det2(v, a) = e1, det2(v, b) = e2
            x = Fraction(e2 * a[0] - e1 * b[0], d)
            y = Fraction(e2 * a[1] - e1 * b[1], d)
            if x.denominator == 1 and y.denominator == 1:
                found.append((int(x), int(y)))
    return found


def test_fiber_sum_reproduces_extracted_graph(k2):
    graph = extract_graph(k2.cone, k2.reeb)
    bundle = lens_bundle_of(graph)
    germ = germ_of_chain(k2.cone, k2.reeb, 0, 3)
    assert isomorphic(assemble_fiber_sum(bundle, [germ]), graph)

    doubled = assemble_fiber_sum(bundle, [germ, germ])
    assert count_nontrivial_chains(doubled) == 2
    assert len(doubled.edges) == 4
    assert all(f.seifert == (0, (2, 2)) for f in doubled.fat)

    empty = assemble_fiber_sum(bundle, [])
    assert empty.edges == () and count_nontrivial_chains(empty) == 0


def test_germ_needs_flat_ends(k2):
    with pytest.raises(AssemblyError):
        germ_of_chain(k2.cone, k2.reeb, 1, 3)


def test_fiber_sum_rejects_mismatched_bundle(k2):
    graph = extract_graph(k2.cone, k2.reeb)
    bundle = lens_bundle_of(graph)
    germ = germ_of_chain(k2.cone, k2.reeb, 0, 3)
    wrong = replace(bundle, min_direction=bundle.max_direction)
    with pytest.raises(AssemblyError):
        assemble_fiber_sum(wrong, [germ])
