import random

import pytest

from coeffective.builder import (
    StructureData,
    StructureError,
    build_extended_complex,
    exactness_defects,
    extend,
    middle_operator,
    random_covector,
    second_half_symbol_complex,
    symbol_complex,
    symbol_double_complex,
    validate_structure,
)
from coeffective.exterior import Form, enumerate_basis, graded_dim, wedge
from coeffective.homology import cohomology, les_from_double
from coeffective.models import LIE_BUILTINS, LieAlgebraModel, abelian, builtin
from coeffective.structures import Calibration, standard_g2, standard_symplectic

from conftest import random_form

ALL = [("torus", 2), ("torus", 3), ("hopf4", None), ("kodaira_thurston", None), ("torus7_g2", None),
       ("cpn", 2), ("cpn", 3)]


def ids(case):
    name, n = case
    return name if n is None else f"{name}{n}"


@pytest.mark.parametrize("case", ALL, ids=[ids(c) for c in ALL])
def test_double_complex_commutes_and_extension_squares_to_zero(case):
    s = builtin(case[0], n=case[1])
    dc = s.double_complex()
    assert dc.commutes()
    top, bottom = dc.rows()
    assert top.squares_to_zero() and bottom.squares_to_zero()
    ec = extend(dc, provenance=s)
    assert ec.squares_to_zero()
    assert len(ec.positions) == dc.m + dc.p
    assert ec.positions[ec.middle].order == 2


@pytest.mark.parametrize("case", ALL, ids=[ids(c) for c in ALL])
def test_euler_characteristic_agrees(case):
    s = builtin(case[0], n=case[1])
    dc = s.double_complex()
    ec = extend(dc)
    direct = cohomology(ec.cochain_complex())
    assert direct.euler_characteristic() == ec.cochain_complex().euler_characteristic()
    les = les_from_double(dc, *(("g2", None) if case[0] == "torus7_g2" else ("symplectic", case[1] or 2)))
    assert les.euler_characteristic() == direct.euler_characteristic()


def test_space_dimensions_torus4():
    ec = build_extended_complex(builtin("torus", n=2))
    # Λ^0, Λ^1, Λ^2/J, ker J on Λ^2, ker J on Λ^3, Λ^4
    assert ec.dims == (1, 4, 5, 5, 4, 1)
    assert [p.realization for p in ec.positions] == ["full", "full", "cokernel", "kernel", "full", "full"]


def test_space_dimensions_g2():
    ec = build_extended_complex(builtin("torus7_g2"))
    assert ec.dims == (1, 7, 21, 34, 28, 28, 34, 21, 7, 1)
    assert ec.middle == 4


@pytest.mark.parametrize("name", LIE_BUILTINS)
def test_middle_operator_kills_calibration_multiples(name):
    s = builtin(name)
    cal = s.cal
    m, c, p = cal.dim, cal.iso_degree, cal.degree
    mid = c + p - 1
    rng = random.Random(7)
    for _ in range(10):
        eta = random_form(m, mid - p, rng)
        w = wedge(eta, cal.form)
        if w.is_zero():
            continue
        assert middle_operator(s, w).is_zero()


def test_middle_operator_nonzero_somewhere():
    s = builtin("torus", n=2)
    h = builtin("hopf4")
    assert any(not middle_operator(h, Form(4, {b: 1})).is_zero() for b in enumerate_basis(4, 2))
    # d vanishes on the torus, so the zig-zag does too
    assert middle_operator(s, Form(4, {(1, 3): 1})).is_zero()


@pytest.mark.parametrize("name", ["hopf4", "kodaira_thurston", "torus"])
@pytest.mark.parametrize("lam", [2, -3])
def test_rescaling_invariance(name, lam):
    s = builtin(name)
    t = s.scaled(lam)
    assert validate_structure(t).ok
    e1, e2 = build_extended_complex(s), build_extended_complex(t)
    assert e1.dims == e2.dims
    assert cohomology(e1.cochain_complex()).dims == cohomology(e2.cochain_complex()).dims


def corrupt(cal, form):
    # bypass construction-time checks to exercise the validator's last line of defence
    obj = object.__new__(Calibration)
    for k, v in (("kind", cal.kind), ("dim", cal.dim), ("form", form), ("inverse", None)):
        object.__setattr__(obj, k, v)
    return obj


def test_validation_codes():
    hopf = builtin("hopf4")
    broken = LieAlgebraModel("broken", 4, ((1, 2, 3, 1), (2, 1, 2, 1)))
    cases = [
        (StructureData(broken, Form.zero(4), standard_symplectic(2)), "D_SQUARED_NONZERO"),
        (StructureData(abelian("t", 4), Form.zero(6), standard_symplectic(2)), "DIMENSION_MISMATCH"),
        (StructureData(abelian("t", 4), Form.basis(4, 1, 2), standard_symplectic(2)), "ALPHA_DEGREE"),
        (hopf.with_alpha(Form.basis(4, 2)), "ALPHA_NOT_CLOSED"),
        (hopf.with_alpha(Form.zero(4)), "STRUCTURE_EQUATION"),
        (StructureData(abelian("t", 4), Form.zero(4), corrupt(standard_symplectic(2), Form(4, {(1, 2): 1}))),
         "DEGENERATE_CALIBRATION"),
    ]
    for s, code in cases:
        rep = validate_structure(s)
        assert not rep.ok and rep.code == code
        with pytest.raises(StructureError) as exc:
            build_extended_complex(s)
        assert exc.value.code == code


def test_dsquared_reported_before_other_failures():
    broken = LieAlgebraModel("broken", 4, ((1, 2, 3, 1), (2, 1, 2, 1)))
    rep = validate_structure(StructureData(broken, Form.basis(4, 2), standard_symplectic(2)))
    assert rep.code == "D_SQUARED_NONZERO" and rep.details["blade"] == [1]


def test_closed_alpha_on_torus_gives_zero_twisted_cohomology():
    # conformal structure with α = e1 needs dJ = 2 e1∧J, which fails on the torus
    s = builtin("torus", n=2).with_alpha(Form.basis(4, 1))
    assert validate_structure(s).code == "STRUCTURE_EQUATION"


@pytest.mark.parametrize("cal", [standard_symplectic(2), standard_symplectic(3), standard_g2()],
                         ids=["n2", "n3", "g2"])
def test_symbol_complex_exact(cal):
    rng = random.Random(11)
    for _ in range(10):
        xi = random_covector(cal.dim, rng)
        assert exactness_defects(symbol_complex(cal, xi)) == []
        half = exactness_defects(second_half_symbol_complex(cal, xi))
        assert [r for r, _ in half] == [0]


def test_symbol_complex_dims_match_extended():
    cal = standard_symplectic(2)
    c = symbol_complex(cal, Form.basis(4, 1))
    assert c.dims == (1, 4, 5, 5, 4, 1)
    with pytest.raises(ValueError):
        symbol_double_complex(cal, Form.zero(4))
    with pytest.raises(ValueError):
        symbol_double_complex(cal, Form.basis(4, 1, 2))


def test_random_covector_nonzero():
    rng = random.Random(0)
    for _ in range(200):
        xi = random_covector(3, rng)
        assert not xi.is_zero() and xi.degree() == 1


def test_json_serialization():
    ec = build_extended_complex(builtin("hopf4"))
    data = ec.to_json()
    assert [p["dim"] for p in data["positions"]] == list(ec.dims)
    assert data["positions"][2]["order"] == 2
    assert "differential" not in data["positions"][-1]
