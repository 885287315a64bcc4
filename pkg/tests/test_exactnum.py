from fractions import Fraction
import math
import random

import mpmath
import pytest

from kcone.errors import DegenerateInputError, NoProgressionError, PreconditionError
from kcone.exactnum import (
    Mat3Z,
    QuadNumber,
    box_pairs,
    check_discriminant,
    content,
    coprime_pairs,
    cross,
    cross_primitive,
    delzant_witness,
    det2,
    det3,
    dot,
    dot2,
    hermite_frame,
    is_delzant_pair,
    is_primitive,
    lie_coordinates,
    plane_lattice_basis,
    plane_point,
    prime_in_progression,
    vadd,
    vscale,
)

SQRT2 = QuadNumber(0, 1)


def test_quad_arithmetic():
    a = QuadNumber(1, 1)
    assert a * a.conjugate() == -1
    assert a.norm() == -1
    assert a / a == 1
    assert (a + 1) - 1 == a
    assert 2 * SQRT2 * SQRT2 == 4
    assert str(QuadNumber(Fraction(1, 2), -3)) == "1/2+-3*sqrt(2)"
    assert str(QuadNumber(5)) == "5"


@pytest.mark.parametrize(
    "rat, irr, expected",
    [(3, -2, 1), (1, -1, -1), (-3, 2, -1), (0, 0, 0), (0, 5, 1), (-7, 5, 1)],
)
def test_quad_sign(rat, irr, expected):
    assert QuadNumber(rat, irr).sign() == expected


def test_quad_ordering_against_rationals():
    assert SQRT2 > Fraction(7, 5)
    assert SQRT2 < Fraction(3, 2)
    assert QuadNumber(1, -1) < 0
    assert float(SQRT2) == pytest.approx(math.sqrt(2))


def test_mixed_discriminants_are_rejected():
    with pytest.raises(TypeError):
        QuadNumber(1, 1, 2) + QuadNumber(1, 1, 3)


def test_square_discriminant():
    assert check_discriminant(3) == 3
    with pytest.raises(PreconditionError):
        check_discriminant(4)


def test_delzant_pairs():
    assert is_delzant_pair((1, 0, 1), (1, 1, 1))
    l = delzant_witness((1, 0, 1), (1, 1, 1))
    assert det3((1, 0, 1), (1, 1, 1), l) == 1
    # cross product (-2, -2, 2) has content 2
    assert not is_delzant_pair((1, 0, 1), (1, 2, 3))
    assert delzant_witness((1, 0, 1), (1, 2, 3)) is None
    assert delzant_witness((1, 2, 3), (1, 1, 1)) == (-1, 0, 0)


def test_cross_primitive_of_parallel_vectors():
    assert cross_primitive((1, 0, 1), (1, 3, 7)) == (-1, -2, 1)
    with pytest.raises(DegenerateInputError):
        cross_primitive((1, 2, 3), (2, 4, 6))


@pytest.mark.parametrize("v0", [(1, -2, 1), (-1, -2, 1), (3, 5, 7), (0, 0, 1)])
def test_plane_lattice(v0):
    u1, u2 = plane_lattice_basis(v0)
    assert dot(u1, v0) == 0 and dot(u2, v0) == 0
    assert det3(u1, u2, v0) == dot(v0, v0)
    assert dot(plane_point(v0, 5), v0) == 5

    x = vadd(vscale(2, u1), vscale(-3, u2))
    assert tuple(lie_coordinates(x, u1, u2, v0)) == (2, -3)


def test_prime_in_progression():
    assert prime_in_progression(1, 4, 10) == 13
    assert prime_in_progression(2, 3, 0) == 2
    with pytest.raises(NoProgressionError):
        prime_in_progression(2, 4, 1)


def test_mat3z():
    u = Mat3Z.from_columns((1, 0, 0), (2, 1, 0), (3, 4, 1))
    assert u.det() == 1 and u.is_unimodular()
    inv = Mat3Z.from_columns(*u.inverse())
    assert u @ inv == Mat3Z.identity()
    assert u.left_divide(u) == Mat3Z.identity()
    assert u.apply(u.solve((1, 2, 3))) == (1, 2, 3)
    assert u.entry(0, 1) == 2
    assert u.transpose().entry(1, 0) == 2
    with pytest.raises(DegenerateInputError):
        Mat3Z.from_columns((1, 0, 0), (2, 0, 0), (0, 0, 1)).solve((1, 1, 1))


def test_hermite_frame():
    c1, c2 = (2, 1), (1, 3)
    rows = hermite_frame(c1, c2)
    assert abs(det2(*rows)) == 1
    image1 = tuple(r[0] * c1[0] + r[1] * c1[1] for r in rows)
    image2 = tuple(r[0] * c2[0] + r[1] * c2[1] for r in rows)
    assert image1 == (1, 0)
    assert image2[1] == 5
    assert 0 <= image2[0] < 5


def test_search_orders():
    pairs = coprime_pairs(3)
    assert (0, 0) not in pairs
    assert all(math.gcd(a, b) == 1 for a, b in pairs)
    sizes = [max(abs(a), abs(b)) for a, b in pairs]
    assert sizes == sorted(sizes)
    assert len(box_pairs(2)) == 25


def random_primitive(rng: random.Random, radius: int = 5) -> tuple[int, int, int]:
    while True:
        v = tuple(rng.randint(-radius, radius) for _ in range(3))
        if any(v) and is_primitive(v):
            return v  # type: ignore[return-value]


def test_quad_sign_matches_high_precision_float():
    rng = random.Random(3)
    with mpmath.workprec(60):
        for _ in range(10_000):
            rat = Fraction(rng.randint(-10_000, 10_000), rng.randint(1, 100))
            irr = Fraction(rng.randint(-10_000, 10_000), rng.randint(1, 100))
            x = QuadNumber(rat, irr)
            approx = mpmath.mpf(rat.numerator) / rat.denominator + mpmath.mpf(irr.numerator) / irr.denominator * mpmath.sqrt(2)
            assert x.sign() == mpmath.sign(approx)
            assert (x + SQRT2) - SQRT2 == x


@pytest.mark.parametrize("p, q", [(3, 2), (17, 12), (99, 70), (577, 408), (3363, 2378), (19601, 13860)])
def test_quad_sign_near_sqrt2(p, q):
    # p/q are convergents of sqrt(2), so p - q sqrt(2) is tiny
    assert QuadNumber(p, -q).sign() == 1
    assert QuadNumber(-p, q).sign() == -1
    assert QuadNumber(Fraction(p, q), -1) > 0


def test_det3_is_alternating():
    rng = random.Random(4)
    for _ in range(200):
        u, v, w = (random_primitive(rng) for _ in range(3))
        d = det3(u, v, w)
        assert det3(v, u, w) == det3(u, w, v) == det3(w, v, u) == -d
        assert det3(v, w, u) == d
        assert det3(u, v, u) == 0


def test_delzant_witness_on_random_pairs():
    rng = random.Random(8)
    found = missing = 0
    for _ in range(500):
        n, m = random_primitive(rng), random_primitive(rng)
        if not any(cross(n, m)):
            continue
        l = delzant_witness(n, m)
        if l is None:
            assert content(cross(n, m)) > 1
            missing += 1
        else:
            assert det3(n, m, l) == 1
            found += 1

        c = cross_primitive(n, m)
        assert dot(c, n) == 0 and dot(c, m) == 0
    assert found and missing


def test_hermite_frame_on_random_columns():
    rng = random.Random(12)
    for _ in range(200):
        c1 = (rng.randint(-9, 9), rng.randint(-9, 9))
        c2 = (rng.randint(-9, 9), rng.randint(-9, 9))
        if det2(c1, c2) == 0:
            continue
        rows = hermite_frame(c1, c2)
        assert abs(det2(*rows)) == 1
        g, zero = dot2(rows[0], c1), dot2(rows[1], c1)
        h12, h22 = dot2(rows[0], c2), dot2(rows[1], c2)
        assert g > 0 and zero == 0
        assert 0 <= h12 < h22
        assert g * h22 == abs(det2(c1, c2))
