import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from coeffective.exterior import Form, enumerate_basis

small_fraction = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def small_matrix(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small_fraction, min_size=c, max_size=c), min_size=r, max_size=r)))


def random_form(m: int, k: int, rng: random.Random, density: float = 0.6) -> Form:
    terms = {}
    for b in enumerate_basis(m, k):
        if rng.random() < density:
            terms[b] = Fraction(rng.randint(-6, 6), rng.randint(1, 3))
    return Form(m, terms)


@pytest.fixture
def rng():
    return random.Random(12345)
