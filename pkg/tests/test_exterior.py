import random
from fractions import Fraction
from itertools import permutations
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from coeffective.exterior import (
    Bivector,
    DegreeError,
    DimensionError,
    Form,
    contract,
    contract_map,
    enumerate_basis,
    graded_dim,
    merge_sign,
    wedge,
    wedge_map,
    wedge_power,
)
from coeffective.structures import symplectic_form

from conftest import random_form


def parity(seq):
    # inversion count, the textbook definition
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 7), min_size=0, max_size=4, unique=True),
       st.lists(st.integers(1, 7), min_size=0, max_size=4, unique=True))
def test_merge_sign_is_permutation_parity(a, b):
    a, b = tuple(sorted(a)), tuple(sorted(b))
    s, blade = merge_sign(a, b)
    if set(a) & set(b):
        assert s == 0
    else:
        assert blade == tuple(sorted(a + b))
        assert s == parity(a + b)


def test_basis_sizes():
    for m in range(1, 8):
        for k in range(m + 1):
            assert len(enumerate_basis(m, k)) == comb(m, k) == graded_dim(m, k)
    assert graded_dim(4, 5) == 0


def test_form_normalizes_blades():
    f = Form(3, {(2, 1): 1, (1, 1): 5})
    assert f == Form(3, {(1, 2): -1})
    with pytest.raises(DimensionError):
        Form(3, {(4,): 1})


@pytest.mark.parametrize("m", [4, 5, 6])
def test_wedge_associative_and_graded_commutative(m):
    rng = random.Random(m)
    for _ in range(20):
        ka, kb, kc = rng.randint(0, 2), rng.randint(0, 2), rng.randint(0, 2)
        a, b, c = (random_form(m, k, rng) for k in (ka, kb, kc))
        assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))
        assert wedge(a, b) == wedge(b, a) * (-1) ** (ka * kb)


def test_wedge_map_agrees_with_wedge():
    rng = random.Random(3)
    m = 6
    f = random_form(m, 2, rng)
    for k in range(0, 5):
        for side in ("left", "right"):
            mat = wedge_map(f, k, side=side)
            w = random_form(m, k, rng)
            expect = wedge(f, w) if side == "left" else wedge(w, f)
            assert mat.apply(w.to_vector(k)) == expect.to_vector(k + 2)
    with pytest.raises(DegreeError):
        wedge_map(f, 5)


def test_symplectic_powers():
    J = symplectic_form(2)
    assert wedge_power(J, 2) == Form(4, {(1, 2, 3, 4): 2})
    J3 = symplectic_form(3)
    assert wedge_power(J3, 3) == Form(6, {(1, 2, 3, 4, 5, 6): 6})
    assert wedge_power(J3, 4).is_zero()


def test_inverse_bivector():
    J = symplectic_form(3)
    inv = Bivector.inverse_of(J)
    assert inv[1, 2] == 1 and inv[2, 1] == -1
    # J_{ac} J^{bc} = δ
    low = lambda a, b: J.terms.get((a, b), 0) - J.terms.get((b, a), 0)
    for a in range(1, 7):
        for b in range(1, 7):
            assert sum(low(a, c) * inv[b, c] for c in range(1, 7)) == (1 if a == b else 0)
    with pytest.raises(ValueError):
        Bivector.inverse_of(Form(4, {(1, 2): 1}))
    with pytest.raises(ValueError):
        Bivector(2, [[0, 1], [1, 0]])


def test_contraction_of_J_is_n():
    for n in (1, 2, 3):
        J = symplectic_form(n)
        assert contract(Bivector.inverse_of(J), J) == Form.scalar(2 * n, n)


def test_contract_map_matches_contract():
    rng = random.Random(5)
    J = symplectic_form(2)
    inv = Bivector.inverse_of(J)
    for k in (2, 3, 4):
        w = random_form(4, k, rng)
        assert contract_map(inv, k).apply(w.to_vector(k)) == contract(inv, w).to_vector(k - 2)


def test_literal_round_trip():
    f = Form(5, {(1, 3): Fraction(-2, 3), (2, 4, 5): 7})
    assert Form.from_literal(5, f.to_literal()) == f
    assert Form.from_vector(5, 2, Form(5, {(1, 3): 1}).to_vector(2)) == Form(5, {(1, 3): 1})


def test_degree_of_mixed_form_raises():
    f = Form.basis(3, 1) + Form.basis(3, 1, 2)
    assert f.degrees() == {1, 2}
    with pytest.raises(DegreeError):
        f.degree()
