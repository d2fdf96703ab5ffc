"""Shared generators for the seeded property tests.

Everything takes an explicit random.Random so failures reproduce from the
seed printed by the test that drew it.
"""

import random
from fractions import Fraction

import pytest

from analytica.forms import HomogeneousForm, monomial_basis
from analytica.geometry import Hyperplane, VectorPlane2
from analytica._linalg import mat, rank


def rand_fraction(rng, bound=1000):
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def rand_point(rng, n, bound=20):
    return tuple(rand_fraction(rng, bound) for _ in range(n))


def rand_form(rng, n, d, bound=1000, density=0.7):
    """Random nonzero form with numerators and denominators up to bound."""
    basis = monomial_basis(n, d)
    terms = {}
    for idx in basis:
        if rng.random() < density:
            terms[idx] = rand_fraction(rng, bound)
    if not any(terms.values()):
        terms[basis[rng.randrange(len(basis))]] = Fraction(1)
    return HomogeneousForm(n, d, terms)


def rand_hyperplane(rng, n, bound=9):
    while True:
        v = tuple(Fraction(rng.randint(-bound, bound)) for _ in range(n))
        if any(v):
            return Hyperplane(v)


def rand_hyperplane_set(rng, n, count):
    """Distinct random hyperplanes; distinct normals are general position
    with probability 1, and the gluing itself rejects the rest."""
    planes = []
    seen = set()
    while len(planes) < count:
        h = rand_hyperplane(rng, n)
        if h.normal not in seen:
            seen.add(h.normal)
            planes.append(h)
    return planes


def rand_axis_plane(rng, n, bound=5):
    while True:
        b1 = tuple(Fraction(rng.randint(-bound, bound)) for _ in range(n))
        b2 = tuple(Fraction(rng.randint(-bound, bound)) for _ in range(n))
        if rank(mat((b1, b2))) == 2:
            return VectorPlane2((b1, b2))


@pytest.fixture
def rng():
    return random.Random(987654321)
