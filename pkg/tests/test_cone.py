import random

import pytest

from kcone.cone import (
    CONVEXITY,
    DELZANT,
    GoodCone,
    can_blowdown_to_orbit,
    face_invariants,
    gluing_ce,
    require_good,
    validate,
    witness,
)
from kcone.construct import example_family
from kcone.errors import DegenerateInputError, PreconditionError, ValidityError
from kcone.exactnum import combine, cross, det3, dot, is_delzant_pair, is_primitive, primitive

from tests.conftest import E1, E2, E3, random_unimodular


def test_good_examples(k2, simplicial, cut_cone):
    assert validate(k2.cone).is_good
    assert validate(simplicial).is_good
    assert validate(cut_cone).is_good


def test_wrong_orientation_is_not_good():
    report = validate(GoodCone((E1, E3, E2)))
    assert not report.is_good
    assert {f.kind for f in report.failures} == {CONVEXITY}
    with pytest.raises(ValidityError):
        require_good(GoodCone((E1, E3, E2)))


def test_load_reverses_negative_orientation():
    with pytest.warns(UserWarning):
        cone = GoodCone.load([E1, E3, E2])
    assert cone == GoodCone((E1, E2, E3))


def test_malformed_normals():
    with pytest.raises(DegenerateInputError):
        GoodCone((E1, E2))
    with pytest.raises(DegenerateInputError):
        GoodCone((E1, E2, (0, 0, 0)))
    with pytest.raises(PreconditionError):
        GoodCone((E1, E2, (0, 0, 2)))


def test_non_delzant_pair_is_reported():
    # det3 > 0 everywhere but (1,0,1) x (1,2,3) has content 2
    report = validate(GoodCone(((1, 0, 1), (1, 2, 3), (1, 1, 4), (0, -1, 1))))
    assert DELZANT in {f.kind for f in report.failures}


def test_cyclic_indexing(k2):
    cone = k2.cone
    assert cone[-1] == cone[len(cone) - 1]
    assert cone[len(cone)] == cone[0]
    assert cone.index(-1) == len(cone) - 1


@pytest.mark.parametrize("k", [2, 3, 5])
def test_example_faces_are_unremovable_rp3(k):
    cone = example_family(k).cone
    for i in range(1, k + 1):
        inv = face_invariants(cone, i)
        assert (inv.b, inv.f) == (2, 0)
        assert not can_blowdown_to_orbit(cone, i)


def test_invariants_do_not_depend_on_witness(k2, corpus):
    rng = random.Random(5)
    cones = [k2.cone, *corpus]
    for _ in range(100):
        cone = rng.choice(cones)
        i = rng.randrange(len(cone))
        a, b, c, d = (rng.randint(-4, 4) for _ in range(4))
        l1 = combine((1, a, b), (witness(cone, i - 1), cone[i - 1], cone[i]))
        l2 = combine((1, c, d), (witness(cone, i), cone[i], cone[i + 1]))
        shifted = face_invariants(cone, i, l1, l2)
        inv = face_invariants(cone, i)
        assert (shifted.b, shifted.f) == (inv.b, inv.f)


def test_bad_witness(k2):
    with pytest.raises(PreconditionError):
        face_invariants(k2.cone, 1, l1=(0, 0, 0))


def test_blowdown_criterion_matches_delzant_neighbours(k2, k3, corpus):
    # gcd(b, f) = 1 exactly when the neighbours of face i form a Delzant pair
    for cone in [k2.cone, k3.cone, *corpus]:
        for i in range(len(cone)):
            assert can_blowdown_to_orbit(cone, i) == is_delzant_pair(cone[i - 1], cone[i + 1])


def test_gluing_data(k3):
    cone = k3.cone
    c, e = gluing_ce(cone, 1)
    # e depends on the witnesses, only its class mod c does not
    assert (c, e % c) == (2, 0)
    for i in range(len(cone)):
        assert gluing_ce(cone, i)[0] == det3(cone[i], cone[i + 1], cone[i + 2])


def test_validity_is_lattice_invariant(corpus):
    rng = random.Random(11)
    for cone in corpus:
        u = random_unimodular(rng)
        moved = cone.transform(u)
        assert validate(moved).is_good
        for i in range(len(cone)):
            assert face_invariants(moved, i).b == face_invariants(cone, i).b



def test_heegaard_block_of_gluing(k2, k3, corpus):
    for cone in [k2.cone, k3.cone, *corpus]:
        for i in range(len(cone)):
            inv = face_invariants(cone, i)
            assert inv.heegaard_det == -1
            assert inv.b == abs(inv.gluing.entry(0, 1))
            assert (inv.gluing.entry(2, 1) - inv.f) % inv.b == 0


def brute_force_is_good(normals):
    """Good exactly when the extremal rays of {n·x >= 0} run through the list in order."""
    size = len(normals)
    if any(not any(cross(normals[i], normals[j])) for i in range(size) for j in range(i + 1, size)):
        return False

    incidences = set()
    for i in range(size):
        for j in range(i + 1, size):
            r = primitive(cross(normals[i], normals[j]))
            for s, pair in ((1, (i, j)), (-1, (j, i))):
                ray = tuple(s * a for a in r)
                pairings = [dot(n, ray) for n in normals]
                if min(pairings) < 0:
                    continue
                if pairings.count(0) > 2:
                    return False
                incidences.add(pair)

    consecutive = {(i, (i + 1) % size) for i in range(size)}
    if incidences != consecutive:
        return False
    return all(is_delzant_pair(normals[i], normals[(i + 1) % size]) for i in range(size))


def test_validate_agrees_with_face_lattice(k2, corpus):
    rng = random.Random(29)
    samples = [c.normals for c in [k2.cone, *corpus] if len(c) <= 6]
    for normals in list(samples):
        shuffled = list(normals)
        rng.shuffle(shuffled)
        samples.append(tuple(shuffled))
        samples.append((normals[0],) + tuple(reversed(normals[1:])))
    while len(samples) < 600:
        size, normals = rng.randint(3, 6), []
        while len(normals) < size:
            n = tuple(rng.randint(-2, 2) for _ in range(3))
            if any(n) and is_primitive(n):
                normals.append(n)
        samples.append(tuple(normals))

    good = 0
    for normals in samples:
        expected = brute_force_is_good(normals)
        assert validate(GoodCone(normals)).is_good == expected, normals
        good += expected
    assert good > 0
