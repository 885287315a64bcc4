import random

import pytest
import structlog

from kcone.cone import GoodCone
from kcone.construct import example_family
from kcone.errors import KConeError
from kcone.exactnum import Mat3Z
from kcone.reeb import ReebVector, choose_transverse_circle
from kcone.surgery import cut, orbit_blowup_normal

E1, E2, E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)


@pytest.fixture(autouse=True)
def _reset_structlog():
    # The CLI binds structlog to the (captured) sys.stderr; undo it so later
    # tests don't log to a closed capture stream.
    yield
    structlog.reset_defaults()


def random_unimodular(rng: random.Random, steps: int = 6) -> Mat3Z:
    """Product of elementary shears, so det = +1."""
    cols = [list(E1), list(E2), list(E3)]
    for _ in range(steps):
        i, j = rng.sample(range(3), 2)
        c = rng.choice((-2, -1, 1, 2))
        cols[i] = [a + c * b for a, b in zip(cols[i], cols[j])]
    return Mat3Z.from_columns(*cols)


def admissible_reeb(cone: GoodCone) -> ReebVector:
    return ReebVector(tuple(sum(c) for c in zip(*cone)), cone[0])


@pytest.fixture
def k2():
    return example_family(2)


@pytest.fixture
def k3():
    return example_family(3)


@pytest.fixture
def simplicial():
    return GoodCone((E1, E2, E3))


@pytest.fixture
def simplicial_reeb():
    return ReebVector((1, 1, 1), (1, 2, 3))


@pytest.fixture
def cut_cone():
    return GoodCone((E1, E2, (-1, 1, 1), E3))


def build_corpus(seed: int = 7, size: int = 12) -> list[GoodCone]:
    rng = random.Random(seed)
    seeds = [GoodCone((E1, E2, E3)), example_family(2).cone, example_family(3).cone]
    corpus = []
    for n in range(size):
        cone = seeds[n % len(seeds)]
        for _ in range(rng.randrange(1, 3)):
            i = rng.randrange(len(cone))
            cone = cut(cone, orbit_blowup_normal(cone, i)).cone
        corpus.append(cone.transform(random_unimodular(rng, steps=3)))
    return corpus


@pytest.fixture(scope="session")
def corpus():
    return build_corpus()


@pytest.fixture(scope="session")
def rank2_pairs(corpus):
    """(cone, reeb, y) triples with a rank 2 profile and a transverse circle."""
    pairs = []
    for k in range(2, 7):
        family = example_family(k)
        pairs.append((family.cone, family.reeb, choose_transverse_circle(family.cone, family.reeb)))
    for cone in corpus:
        reeb = admissible_reeb(cone)
        try:
            y = choose_transverse_circle(cone, reeb)
        except KConeError:
            continue
        pairs.append((cone, reeb, y))
    return pairs
