from dataclasses import replace
from fractions import Fraction
import math
import random

import pytest

from kcone.errors import DegenerateInputError, IdentityViolation, PreconditionError
from kcone.euler import (
    ChainDescriptor,
    chain_euler_sum,
    covering_lens,
    covering_quotient,
    critical_jump,
    euler_lens,
    euler_near_B_lens,
    euler_near_B_orbit,
    euler_quotient,
    euler_s3,
    verify_global_identity,
    vertex_weight,
)
from kcone.reeb import isotropy_profile


def test_s3():
    assert euler_s3(1, 1) == -1
    assert euler_s3(2, 3) == Fraction(-1, 6)
    assert euler_s3(1, -1) == 1
    with pytest.raises(DegenerateInputError):
        euler_s3(0, 1)


def test_quotient_and_lens_values():
    assert euler_quotient(2, 1, 1, 1, 1, 0) == 2
    assert euler_lens(1, 0, 2, 3) == Fraction(-1, 4)
    assert euler_lens(2, 1, 1, 1) == -2
    assert euler_lens(5, 2, 1, 0) == -1
    with pytest.raises(PreconditionError):
        euler_lens(4, 2, 1, 1)
    with pytest.raises(PreconditionError):
        euler_quotient(0, 1, 1, 1, 1, 0)


def test_lens_covering_relation():
    rng = random.Random(5)
    checked = 0
    while checked < 500:
        p, q = rng.randint(1, 12), rng.randint(-12, 12)
        m1, m2 = rng.randint(-9, 9), rng.randint(-9, 9)
        if math.gcd(p, q) != 1 or m1 == 0 or p * m1 - q * m2 == 0:
            continue
        assert euler_lens(p, q, m1, m2) == covering_lens(p, q, m1, m2) * euler_s3(m1, p * m1 - q * m2)
        checked += 1


def test_quotient_covering_relation():
    rng = random.Random(6)
    checked = 0
    while checked < 500:
        a = (rng.randint(1, 9), rng.randint(-9, 9), rng.randint(-9, 9))
        b = (rng.randint(-9, 9), rng.randint(-9, 9), rng.randint(-9, 9))
        w1, w2 = a[0] * b[1] - a[1] * b[0], a[0] * b[2] - a[2] * b[0]
        if w1 == 0 or w2 == 0:
            continue
        assert euler_quotient(*a, *b) == covering_quotient(*a, *b) * euler_s3(w1, w2)
        checked += 1


def test_local_terms():
    assert euler_near_B_orbit(1, 1, 1, False) == -1
    assert euler_near_B_orbit(2, 2, 2, True) == Fraction(1, 2)
    e1, e2, e3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    assert euler_near_B_lens(e1, e2, e3, 1, 1, False) == 1
    assert euler_near_B_lens(e2, e1, e3, 1, 1, False) == -1
    assert euler_near_B_lens(e1, e2, e3, 1, 1, True) == -1
    assert critical_jump(6, 2, 3) == 1
    with pytest.raises(PreconditionError):
        critical_jump(0, 1, 1)


@pytest.mark.parametrize(
    "k, a, total, d",
    [
        ((1, 1), (1,), Fraction(1), 1),
        ((1, 2, 1), (2, 2), Fraction(2), 2),
        ((2, 2), (2,), Fraction(1, 2), 1),
        ((4, 2, 4), (1, 1), Fraction(1, 4), 1),
    ],
)
def test_chain_sums(k, a, total, d):
    assert chain_euler_sum(ChainDescriptor(k, a)) == (total, d)


def test_chain_sum_must_be_integral():
    with pytest.raises(IdentityViolation):
        chain_euler_sum(ChainDescriptor((1, 3, 3, 1), (1, 1, 1)))
    with pytest.raises(PreconditionError):
        ChainDescriptor((1, 2), (1, 1))


def test_example_identity(k2):
    report = verify_global_identity(k2.cone, k2.reeb, (1, 1, 3))
    assert report.ok
    assert report.lhs == report.rhs == Fraction(1, 2)
    assert [(c.chain, c.d) for c in report.per_chain] == [(0, 1)]
    assert vertex_weight(k2.cone, k2.reeb, (1, 1, 3), 1) == 2


def test_simplicial_identity(simplicial, simplicial_reeb):
    report = verify_global_identity(simplicial, simplicial_reeb, (1, 1, 1))
    assert report.ok
    assert report.lhs == report.rhs == 1


def test_tampered_multiplicity_is_caught(k2):
    profile = isotropy_profile(k2.cone, k2.reeb)
    tampered = replace(profile, k=(0, 3, 2, 0, 1))
    assert not verify_global_identity(k2.cone, k2.reeb, (1, 1, 3), tampered).ok


def test_identity_on_corpus(rank2_pairs):
    for cone, reeb, y in rank2_pairs:
        report = verify_global_identity(cone, reeb, y)
        assert report.ok, (cone, report.lhs, report.rhs)
        for term in report.per_chain:
            assert term.d is not None and term.d > 0
