import pytest

from coeffective.exterior import wedge, wedge_map
from coeffective.homology import (
    CochainComplex,
    ComplexError,
    cohomology,
    cup_map,
    les_from_double,
    les_predict,
)
from coeffective.models import builtin
from coeffective.qlinalg import Matrix, rank


def interval():
    # Q -> Q^2 -> Q : x -> (x, x), then zero
    return CochainComplex((1, 2, 1), (Matrix.from_dense([[1], [1]]), Matrix.zeros(1, 2)))


def test_simple_complex():
    c = interval()
    assert c.squares_to_zero()
    t = cohomology(c, generators=True)
    assert t.dims == (0, 1, 1)
    assert t.euler_characteristic() == c.euler_characteristic() == 0
    # (1, 1) is a coboundary, so [e1] = -[e2]
    a = t.class_coordinates(1, (1, 0))
    b = t.class_coordinates(1, (0, 1))
    assert a == tuple(-x for x in b) and any(a)
    exact = CochainComplex((1, 2, 1), (Matrix.from_dense([[1], [1]]), Matrix.from_dense([[1, -1]])))
    assert cohomology(exact).dims == (0, 0, 0)
    with pytest.raises(ValueError):
        cohomology(c, generators=False).class_coordinates(1, (1, 0))


def test_shape_checks():
    with pytest.raises(ComplexError):
        CochainComplex((1, 2), (Matrix.zeros(1, 1),))
    bad = CochainComplex((1, 1, 1), (Matrix.identity(1), Matrix.identity(1)))
    assert bad.first_nonzero_square() == 0


def test_noncocycle_rejected():
    t = cohomology(interval(), generators=True)
    with pytest.raises(ValueError):
        t.class_coordinates(0, (1,))


# rank of [J] on H^1: 4 on the torus; 2 on Kodaira-Thurston since e2∧J = -e123 = d(e34)
@pytest.mark.parametrize("name,lefschetz_rank", [("kodaira_thurston", 2), ("torus", 4)])
def test_cup_with_J_twice_is_cup_with_J_squared(name, lefschetz_rank):
    s = builtin(name)
    J = s.cal.form
    t = cohomology(s.model.de_rham(), generators=True)
    once = cup_map(t, t, 0, wedge_map(J, 0), 2)
    twice = cup_map(t, t, 2, wedge_map(J, 2), 2) @ once
    direct = cup_map(t, t, 0, wedge_map(wedge(J, J), 0), 4)
    assert twice == direct
    # on Λ^1 as well
    once = cup_map(t, t, 1, wedge_map(J, 1), 2)
    assert rank(once) == lefschetz_rank


def test_cup_rejects_nonclosed_class():
    s = builtin("kodaira_thurston")
    t = cohomology(s.model.de_rham(), generators=True)
    from coeffective.exterior import Form

    # e4 is not closed, so wedging with it does not preserve coboundaries
    with pytest.raises(ValueError):
        cup_map(t, t, 1, wedge_map(Form.basis(4, 4), 1), 1)


def test_les_by_hand_cp2():
    one = Matrix.identity(1)
    cups = {0: one, 1: Matrix.zeros(0, 0), 2: one}
    rep = les_predict("symplectic", (1, 0, 1, 0, 1), (1, 0, 1, 0, 1), cups, n=2)
    assert rep.predicted == (1, 0, 0, 0, 0, 1)
    assert rep.euler_characteristic() == 0


def test_les_by_hand_torus4():
    # b = h = (1,4,6,4,1); cup ranks 1, 4, 1 (injective, iso, surjective)
    b = (1, 4, 6, 4, 1)
    cups = {0: Matrix.from_dense([[1]] + [[0]] * 5), 1: Matrix.identity(4), 2: Matrix.from_dense([[1] + [0] * 5])}
    rep = les_predict("symplectic", b, b, cups, n=2)
    assert rep.predicted == (1, 4, 5, 5, 4, 1)


def test_les_input_errors():
    with pytest.raises(ValueError):
        les_predict("symplectic", (1,), (1,), {}, n=2)
    with pytest.raises(ValueError):
        les_predict("nope", (1,), (1,), {})
    with pytest.raises(ValueError):
        les_predict("symplectic", (1, 0, 1, 0, 1), (1, 0, 1, 0, 1), {}, n=2)


def test_g2_les_identifications_torus():
    s = builtin("torus7_g2")
    rep = les_from_double(s.double_complex(), "g2")
    assert rep.plain == rep.twisted == (1, 7, 21, 35, 35, 21, 7, 1)
    assert [rep.delta_ranks[k] for k in range(5)] == [1, 7, 21, 7, 1]
    assert rep.to_json()["predicted"] == [1, 7, 21, 34, 28, 28, 34, 21, 7, 1]
