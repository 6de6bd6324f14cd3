"""Finite-dimensional models: Lie-algebra (Chevalley–Eilenberg) models, cohomology
ring models, and polynomial-coefficient local models on Q^m.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from pathlib import Path

import jsonschema

from .builder import DoubleComplex, ExtendedComplex, StructureData, extend
from .exterior import Form, basis_index, enumerate_basis, graded_dim, merge_sign, wedge
from .homology import CochainComplex, cohomology
from .qlinalg import Matrix, Q, format_rational, solve
from .structures import G2, SYMPLECTIC, Calibration, standard_g2, standard_symplectic


class ModelError(ValueError):
    def __init__(self, code: str, message: str, details=None):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.details = details or {}


# ---------------------------------------------------------------------------
# Lie-algebra models


@dataclass(frozen=True)
class LieAlgebraModel:
    """Left-invariant forms on a Lie group.

    ``structure`` entries ``(k, i, j, c)`` with ``i < j`` mean that ``d e^k``
    contains ``c · e^i ∧ e^j``.
    """

    name: str
    dim: int
    structure: tuple = ()

    def __post_init__(self):
        clean = []
        for k, i, j, c in self.structure:
            if not (1 <= k <= self.dim and 1 <= i < j <= self.dim):
                raise ModelError("BAD_STRUCTURE", f"structure constant ({k}, {i}, {j}) out of range or i >= j")
            clean.append((int(k), int(i), int(j), Q(c)))
        object.__setattr__(self, "structure", tuple(clean))

    def d_generator(self, k: int) -> Form:
        return Form(self.dim, [((i, j), c) for kk, i, j, c in self.structure if kk == k])

    def d_blade(self, blade: tuple) -> Form:
        return _d_blade(self, blade)

    def d_form(self, f: Form) -> Form:
        out: dict = {}
        for blade, c in f.terms.items():
            for b, v in self.d_blade(blade).terms.items():
                out[b] = out.get(b, 0) + c * v
        return Form(self.dim, out)

    def d_matrix(self, k: int) -> Matrix:
        return _d_matrix(self, k)

    def first_nonzero_square(self):
        """``(degree, blade, d(d blade))`` for the first failure of d∘d = 0, else None."""
        for k in range(self.dim - 1):
            for blade in enumerate_basis(self.dim, k):
                dd = self.d_form(self.d_blade(blade))
                if not dd.is_zero():
                    return k, blade, dd
        return None

    def validate(self) -> None:
        bad = self.first_nonzero_square()
        if bad is not None:
            k, blade, dd = bad
            raise ModelError("JACOBI", f"d∘d ≠ 0 on Λ^{k} at e{''.join(map(str, blade))}",
                             {"degree": k, "blade": list(blade),
                              "image": {"".join(map(str, b)): format_rational(c) for b, c in dd.terms.items()}})

    def de_rham(self) -> CochainComplex:
        return CochainComplex(tuple(graded_dim(self.dim, k) for k in range(self.dim + 1)),
                              tuple(self.d_matrix(k) for k in range(self.dim)))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "structure": [{"k": k, "i": i, "j": j, "coeff": format_rational(c)} for k, i, j, c in self.structure],
        }


@lru_cache(maxsize=None)
def _d_blade(model: LieAlgebraModel, blade: tuple) -> Form:
    m = model.dim
    out = Form.zero(m)
    for t, g in enumerate(blade):
        dg = model.d_generator(g)
        if dg.is_zero():
            continue
        term = wedge(wedge(Form(m, {blade[:t]: 1}), dg), Form(m, {blade[t + 1:]: 1}))
        out = out + (term if t % 2 == 0 else -term)
    return out


@lru_cache(maxsize=None)
def _d_matrix(model: LieAlgebraModel, k: int) -> Matrix:
    m = model.dim
    cols = [model.d_blade(b).to_vector(k + 1) if not model.d_blade(b).is_zero()
            else (Fraction(0),) * graded_dim(m, k + 1) for b in enumerate_basis(m, k)]
    return Matrix.from_columns(cols, graded_dim(m, k + 1))


def abelian(name: str, dim: int) -> LieAlgebraModel:
    return LieAlgebraModel(name, dim, ())


# ---------------------------------------------------------------------------
# JSON model files

FORM_LITERAL = {
    "type": "array",
    "items": {
        "type": "object",
        "properties": {
            "blade": {"type": "array", "items": {"type": "integer", "minimum": 1}},
            "coeff": {"type": ["string", "integer"]},
        },
        "required": ["blade", "coeff"],
    },
}

MODEL_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "dim": {"type": "integer", "minimum": 1},
        "structure": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "k": {"type": "integer"},
                    "i": {"type": "integer"},
                    "j": {"type": "integer"},
                    "coeff": {"type": ["string", "integer"]},
                },
                "required": ["k", "i", "j", "coeff"],
            },
        },
        "alpha": FORM_LITERAL,
        "calibration": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["symplectic", "g2", "generic"]},
                "form": FORM_LITERAL,
            },
            "required": ["kind", "form"],
        },
    },
    "required": ["name", "dim", "structure"],
}


def _load(source) -> dict:
    if isinstance(source, dict):
        return source
    text = Path(source).read_text() if not hasattr(source, "read") else source.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError("SCHEMA", f"invalid JSON: {exc}") from exc


def parse_model(source) -> LieAlgebraModel:
    data = _load(source)
    try:
        jsonschema.validate(data, MODEL_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ModelError("SCHEMA", exc.message) from exc
    structure = tuple((e["k"], e["i"], e["j"], Q(str(e["coeff"]))) for e in data["structure"])
    model = LieAlgebraModel(data["name"], data["dim"], structure)
    model.validate()
    return model


def parse_structure(source) -> StructureData:
    """A model file that also carries ``alpha`` and ``calibration``."""
    data = _load(source)
    model = parse_model(data)
    if "calibration" not in data:
        raise ModelError("SCHEMA", "model file has no calibration")
    alpha = Form.from_literal(model.dim, data.get("alpha", []))
    cal = Calibration.from_json(model.dim, data["calibration"])
    return StructureData(model, alpha, cal)


# ---------------------------------------------------------------------------
# cohomology ring models


@dataclass(frozen=True)
class RingModel:
    """A cohomology ring with zero differential and multiplication by one class.

    ``cup[k]`` is the matrix of ``[F] ∪ ·: H^k -> H^{k+p}``.
    """

    name: str
    dims: tuple
    class_degree: int
    cup: tuple
    iso_degree: int

    def __post_init__(self):
        m, p = len(self.dims) - 1, self.class_degree
        if len(self.cup) != m - p + 1:
            raise ModelError("RING", "need one cup matrix per source degree 0..m-p")
        for k, mat in enumerate(self.cup):
            if mat.shape != (self.dims[k + p], self.dims[k]):
                raise ModelError("RING", f"cup matrix in degree {k} has the wrong shape")
        from .qlinalg import rank

        for k, mat in enumerate(self.cup):
            r = rank(mat)
            if k <= self.iso_degree and r != self.dims[k]:
                raise ModelError("RING", f"cup product not injective in degree {k}")
            if k >= self.iso_degree and r != self.dims[k + p]:
                raise ModelError("RING", f"cup product not surjective in degree {k}")
        # the top power of the class must survive (non-degeneracy of the class)
        if m % p == 0 and self.dims[0] and self.dims[m]:
            power = Matrix.identity(self.dims[0])
            for k in range(0, m, p):
                power = self.cup[k] @ power
            if power.is_zero():
                raise ModelError("RING", "top power of the class vanishes")

    @property
    def m(self) -> int:
        return len(self.dims) - 1

    def double_complex(self) -> DoubleComplex:
        m, p = self.m, self.class_degree
        zero = tuple(Matrix.zeros(self.dims[k + 1], self.dims[k]) for k in range(m))
        column = {k: self.cup[k - p] for k in range(p, m + 1)}
        return DoubleComplex(p, self.iso_degree, self.dims, self.dims, zero, zero, column)


def cpn(n: int) -> RingModel:
    if n < 1:
        raise ModelError("PARAMS", "CP^n needs n >= 1")
    dims = tuple(1 if k % 2 == 0 else 0 for k in range(2 * n + 1))
    cup = tuple(Matrix.identity(1) if k % 2 == 0 else Matrix.zeros(0, 0) for k in range(2 * n - 1))
    return RingModel(f"cp{n}", dims, 2, cup, n - 1)


# ---------------------------------------------------------------------------
# polynomial local models


@lru_cache(maxsize=None)
def monomials(m: int, a: int) -> tuple:
    """Exponent vectors of total degree ``a`` in ``m`` variables."""
    if a < 0:
        return ()
    out = []
    for combo in combinations_with_replacement(range(m), a):
        e = [0] * m
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(m: int, a: int) -> dict:
    return {e: i for i, e in enumerate(monomials(m, a))}


def poly_dim(m: int, k: int, a: int) -> int:
    return graded_dim(m, k) * len(monomials(m, a))


@lru_cache(maxsize=None)
def poly_d_matrix(m: int, k: int, a: int) -> Matrix:
    """de Rham d from Λ^k ⊗ P_a to Λ^{k+1} ⊗ P_{a-1}; index ``blade*|P| + monomial``."""
    src_b = enumerate_basis(m, k)
    src_m = monomials(m, a)
    tgt_idx = basis_index(m, k + 1) if k + 1 <= m else {}
    tgt_mi = monomial_index(m, a - 1)
    nt = len(tgt_mi)
    nrows = len(tgt_idx) * nt
    ncols = len(src_b) * len(src_m)
    rows: list[dict] = [{} for _ in range(nrows)]
    for bi, blade in enumerate(src_b):
        for mi, e in enumerate(src_m):
            col = bi * len(src_m) + mi
            for i in range(m):
                if not e[i]:
                    continue
                s, nb = merge_sign((i + 1,), blade)
                if not s:
                    continue
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                row = tgt_idx[nb] * nt + tgt_mi[ne]
                rows[row][col] = rows[row].get(col, 0) + s * e[i]
    return Matrix(nrows, ncols, rows)


@dataclass(frozen=True)
class PolynomialModel:
    """Forms with polynomial coefficients on Q^m, graded into finite strands."""

    cal: Calibration
    max_homogeneity: int

    @property
    def dim(self) -> int:
        return self.cal.dim

    def strand_double_complex(self, h: int) -> DoubleComplex:
        m, p = self.cal.dim, self.cal.degree
        top_dims = tuple(poly_dim(m, k, h - k) for k in range(m + 1))
        bottom_dims = tuple(poly_dim(m, k, h - p - k) for k in range(m + 1))
        top_d = tuple(poly_d_matrix(m, k, h - k) for k in range(m))
        bottom_d = tuple(poly_d_matrix(m, k, h - p - k) for k in range(m))
        column = {}
        for k in range(p, m + 1):
            const = _right_wedge_const(self.cal, k - p)
            column[k] = const.kron_identity(len(monomials(m, h - k)))
        return DoubleComplex(p, self.cal.iso_degree, top_dims, bottom_dims, top_d, bottom_d, column)

    def strand(self, h: int) -> ExtendedComplex:
        if not 0 <= h <= self.max_homogeneity:
            raise ModelError("PARAMS", f"strand {h} outside 0..{self.max_homogeneity}")
        return extend(self.strand_double_complex(h), provenance=self)

    def de_rham_strand(self, h: int) -> CochainComplex:
        m = self.cal.dim
        return CochainComplex(tuple(poly_dim(m, k, h - k) for k in range(m + 1)),
                              tuple(poly_d_matrix(m, k, h - k) for k in range(m)))


@lru_cache(maxsize=None)
def _right_wedge_const(cal: Calibration, k: int) -> Matrix:
    from .exterior import wedge_map

    return wedge_map(cal.form, k, side="right")


def strand_shift(cal: Calibration, r: int) -> int:
    """Coefficient degree at position r of strand h is ``h - strand_shift(r)``."""
    mid = cal.iso_degree + cal.degree - 1
    return r if r <= mid else r + 1


def strand_complex(p: PolynomialModel, shape: Calibration, h: int, alpha: Form | None = None) -> CochainComplex:
    if alpha is not None and not alpha.is_zero():
        raise ModelError("UNSUPPORTED", "polynomial strands only support α = 0")
    if shape != p.cal:
        p = PolynomialModel(shape, p.max_homogeneity)
    return p.strand(h).cochain_complex()


def local_exactness(cal: Calibration, max_h: int) -> dict:
    """Nonzero strand cohomology ``{(position, h): dim}`` for ``h <= max_h``."""
    model = PolynomialModel(cal, max_h)
    found = {}
    for h in range(max_h + 1):
        table = cohomology(model.strand(h).cochain_complex())
        for r, d in enumerate(table.dims):
            if d:
                found[(r, h)] = d
    return found


class PolyForm:
    """A differential form with polynomial coefficients: ``{(blade, exponents): c}``."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms=None):
        self.dim = dim
        self.terms = {k: Q(v) for k, v in (terms or {}).items() if v}

    def d(self) -> "PolyForm":
        out: dict = {}
        for (blade, e), c in self.terms.items():
            for i in range(self.dim):
                if not e[i]:
                    continue
                s, nb = merge_sign((i + 1,), blade)
                if not s:
                    continue
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                key = (nb, ne)
                out[key] = out.get(key, 0) + s * e[i] * c
        return PolyForm(self.dim, out)

    def wedge_const(self, f: Form) -> "PolyForm":
        """``self ∧ f`` for a constant-coefficient form."""
        out: dict = {}
        for (blade, e), c in self.terms.items():
            for bf, cf in f.terms.items():
                s, nb = merge_sign(blade, bf)
                if s:
                    key = (nb, e)
                    out[key] = out.get(key, 0) + s * c * cf
        return PolyForm(self.dim, out)

    def by_monomial(self) -> dict:
        out: dict = {}
        for (blade, e), c in self.terms.items():
            out.setdefault(e, {})[blade] = c
        return out

    def to_vector(self, k: int, a: int) -> tuple:
        mi = monomial_index(self.dim, a)
        bi = basis_index(self.dim, k)
        v = [Fraction(0)] * (len(bi) * len(mi))
        for (blade, e), c in self.terms.items():
            v[bi[blade] * len(mi) + mi[e]] = c
        return tuple(v)

    def is_zero(self) -> bool:
        return not self.terms

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) - v
        return PolyForm(self.dim, t)

    def __eq__(self, other):
        return isinstance(other, PolyForm) and self.dim == other.dim and self.terms == other.terms


def poly_middle_operator(cal: Calibration, w: PolyForm) -> PolyForm:
    """Zig-zag on a polynomial representative, solved monomial by monomial."""
    m, c, p = cal.dim, cal.iso_degree, cal.degree
    u = w.d()
    col = _right_wedge_const(cal, c)
    sigma: dict = {}
    for e, comps in u.by_monomial().items():
        rhs = Form(m, comps).to_vector(c + p)
        x = solve(col, rhs)
        if x is None:
            raise ModelError("UNSOLVABLE", "middle zig-zag has no solution")
        for blade, v in zip(enumerate_basis(m, c), x):
            if v:
                sigma[(blade, e)] = v
    return PolyForm(m, sigma).d()


# ---------------------------------------------------------------------------
# built-in examples


@dataclass(frozen=True)
class RingStructure:
    """A ring model together with the kind of calibration class it carries."""

    ring: RingModel
    kind: str
    n: int | None = None

    model = property(lambda self: self.ring)
    alpha = None
    cal = None

    def double_complex(self) -> DoubleComplex:
        return self.ring.double_complex()


HOPF4 = LieAlgebraModel("hopf4", 4, ((2, 3, 4, 1), (3, 2, 4, -1), (4, 2, 3, 1)))
KODAIRA_THURSTON = LieAlgebraModel("kodaira_thurston", 4, ((4, 1, 2, 1),))

BUILTINS = ("torus", "torus7_g2", "hopf4", "kodaira_thurston", "cpn", "local")
LIE_BUILTINS = ("torus", "torus7_g2", "hopf4", "kodaira_thurston")


def builtin(name: str, n: int | None = None, m: int | None = None, max_h: int | None = None):
    """Built-in structures.

    torus(n), torus7_g2, hopf4, kodaira_thurston -> StructureData;
    cpn(n) -> RingStructure; local(m, H) -> PolynomialModel.
    """
    if name == "torus":
        n = 2 if n is None else n
        if n < 1:
            raise ModelError("PARAMS", "torus needs n >= 1")
        return StructureData(abelian(f"torus{2 * n}", 2 * n), Form.zero(2 * n), standard_symplectic(n))
    if name == "torus7_g2":
        return StructureData(abelian("torus7", 7), Form.zero(7), standard_g2())
    if name == "hopf4":
        J = Form(4, {(1, 2): -2, (3, 4): 1})
        return StructureData(HOPF4, Form.basis(4, 1), Calibration(SYMPLECTIC, 4, J))
    if name == "kodaira_thurston":
        J = Form(4, {(1, 3): 1, (2, 4): 1})
        return StructureData(KODAIRA_THURSTON, Form.zero(4), Calibration(SYMPLECTIC, 4, J))
    if name == "cpn":
        n = 2 if n is None else n
        return RingStructure(cpn(n), SYMPLECTIC, n)
    if name == "local":
        m = 4 if m is None else m
        max_h = 4 if max_h is None else max_h
        if m == 7:
            cal = standard_g2()
        elif m >= 2 and m % 2 == 0:
            cal = standard_symplectic(m // 2)
        else:
            raise ModelError("PARAMS", "local model needs even m or m = 7")
        return PolynomialModel(cal, max_h)
    raise ModelError("UNKNOWN_BUILTIN", f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}")


def kind_of(s) -> tuple[str, int | None]:
    if isinstance(s, RingStructure):
        return s.kind, s.n
    cal = s.cal
    if cal.kind == G2:
        return G2, None
    return SYMPLECTIC, cal.n
