"""Construction of the extended complexes.

Everything is built from a two-row double complex::

    top:     T^0 -> T^1 -> ... -> T^m        (differential d - 2α∧)
                     ^ ·∧F
    bottom:  B^0 -> B^1 -> ... -> B^m        (differential d)

with column maps ``B^{k-p} -> T^k``.  The first half of the extended complex
consists of the column cokernels in the top row, the second half of the
column kernels in the bottom row, and the two halves are joined through the
column isomorphism ``B^c -> T^{c+p}`` by a zig-zag (the second-order middle
operator).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .exterior import Form, enumerate_basis, graded_dim, wedge, wedge_map
from .homology import CochainComplex
from .qlinalg import Matrix, Q, format_rational, image_quotient, kernel_basis, kernel_free_columns, solve_many
from .structures import Calibration, column_profile


class StructureError(ValueError):
    """A structure failed validation; ``code`` is machine-readable."""

    def __init__(self, code: str, message: str, details=None):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.details = details or {}


# ---------------------------------------------------------------------------
# the double complex


@dataclass(frozen=True)
class DoubleComplex:
    p: int
    iso_degree: int
    top_dims: tuple
    bottom_dims: tuple
    top_d: tuple
    bottom_d: tuple
    column: dict  # k -> Matrix B^{k-p} -> T^k, for p <= k <= m

    @property
    def m(self) -> int:
        return len(self.top_dims) - 1

    @property
    def mid(self) -> int:
        return self.iso_degree + self.p - 1

    def rows(self) -> tuple[CochainComplex, CochainComplex]:
        return (CochainComplex(self.top_dims, self.top_d), CochainComplex(self.bottom_dims, self.bottom_d))

    def commutes(self) -> bool:
        """``D ∘ (·∧F) == (·∧F) ∘ d`` in every degree."""
        for k in range(self.p, self.m):
            lhs = self.top_d[k] @ self.column[k]
            rhs = self.column[k + 1] @ self.bottom_d[k - self.p]
            if lhs != rhs:
                return False
        return True


@lru_cache(maxsize=512)
def _cokernel(col: Matrix):
    return image_quotient(col)


@lru_cache(maxsize=512)
def _kernel(col: Matrix):
    vecs = kernel_basis(col)
    free = kernel_free_columns(col)
    basis = Matrix.from_columns(vecs, col.ncols)
    # kernel vectors are unit vectors on the free columns, so coordinates are a selection
    select = Matrix(len(free), col.ncols, [{f: Fraction(1)} for f in free])
    return basis, select


@lru_cache(maxsize=512)
def _inverse(col: Matrix) -> Matrix:
    if col.nrows != col.ncols:
        raise StructureError("NOT_ISOMORPHISM", "middle column map is not square")
    sols = solve_many(col, Matrix.identity(col.nrows))
    if any(s is None for s in sols):
        raise StructureError("NOT_ISOMORPHISM", "middle column map is singular")
    return Matrix.from_columns(sols, col.ncols)


FULL = "full"
COKERNEL = "cokernel"
KERNEL = "kernel"


@dataclass(frozen=True)
class Position:
    index: int
    realization: str
    row: str  # "top" or "bottom"
    form_degree: int
    dim: int
    order: int  # order of the outgoing differential (0 for the last position)


@dataclass
class ExtendedComplex:
    positions: tuple
    diffs: tuple
    provenance: object = None
    double: DoubleComplex | None = field(default=None, repr=False)

    @property
    def dims(self) -> tuple:
        return tuple(p.dim for p in self.positions)

    @property
    def middle(self) -> int:
        return next(p.index for p in self.positions if p.order == 2)

    def cochain_complex(self) -> CochainComplex:
        return CochainComplex(self.dims, self.diffs, tuple(_label(p) for p in self.positions))

    def squares_to_zero(self) -> bool:
        return self.cochain_complex().squares_to_zero()

    def to_json(self) -> dict:
        out = []
        for pos in self.positions:
            entry = {
                "position": pos.index,
                "dim": pos.dim,
                "realization": pos.realization,
                "row": pos.row,
                "form_degree": pos.form_degree,
            }
            if pos.index < len(self.diffs):
                entry["order"] = pos.order
                entry["differential"] = self.diffs[pos.index].to_strings()
            out.append(entry)
        return {"positions": out}


def _label(pos: Position) -> str:
    if pos.realization == FULL:
        return f"Λ^{pos.form_degree}"
    if pos.realization == COKERNEL:
        return f"Λ^{pos.form_degree}/F∧Λ"
    return f"ker F∧|Λ^{pos.form_degree}"


def extend(dc: DoubleComplex, provenance=None, check: bool = True) -> ExtendedComplex:
    """Assemble the extended complex from a double complex."""
    p, c, m, mid = dc.p, dc.iso_degree, dc.m, dc.mid
    positions = []
    incl, proj = {}, {}
    for r in range(0, mid + 1):
        if r >= p:
            sq = _cokernel(dc.column[r])
            incl[r], proj[r] = sq.inclusion(), sq.project
            positions.append((r, COKERNEL, "top", r, sq.dim))
        else:
            incl[r] = proj[r] = Matrix.identity(dc.top_dims[r])
            positions.append((r, FULL, "top", r, dc.top_dims[r]))
    kbasis, ksel = {}, {}
    for q in range(c + 1, m + 1):
        r = q + p - 1
        if q + p <= m:
            kbasis[q], ksel[q] = _kernel(dc.column[q + p])
            positions.append((r, KERNEL, "bottom", q, kbasis[q].ncols))
        else:
            kbasis[q] = ksel[q] = Matrix.identity(dc.bottom_dims[q])
            positions.append((r, FULL, "bottom", q, dc.bottom_dims[q]))

    diffs = []
    for r in range(0, mid):
        diffs.append(proj[r + 1] @ dc.top_d[r] @ incl[r])
    # middle: w -> u = D w -> σ = L^{-1} u -> d σ
    linv = _inverse(dc.column[mid + 1])
    zig = dc.bottom_d[c] @ linv @ dc.top_d[mid] @ incl[mid]
    if check and c + 1 + p <= m and not (dc.column[c + 1 + p] @ zig).is_zero():
        raise StructureError("MIDDLE_NOT_IN_KERNEL", "middle operator leaves the kernel space")
    diffs.append(ksel[c + 1] @ zig)
    for q in range(c + 1, m):
        img = dc.bottom_d[q] @ kbasis[q]
        if check and q + 1 + p <= m and not (dc.column[q + 1 + p] @ img).is_zero():
            raise StructureError("KERNEL_NOT_PRESERVED", f"d does not preserve the kernel at Λ^{q}")
        diffs.append(ksel[q + 1] @ img)

    last = len(positions) - 1
    pos = tuple(
        Position(i, real, row, deg, dim, 2 if i == mid else (0 if i == last else 1))
        for (i, real, row, deg, dim) in positions
    )
    return ExtendedComplex(pos, tuple(diffs), provenance, dc)


# ---------------------------------------------------------------------------
# structures on Lie-algebra models


@dataclass(frozen=True)
class StructureData:
    model: object  # LieAlgebraModel
    alpha: Form
    cal: Calibration

    @property
    def dim(self) -> int:
        return self.cal.dim

    def scaled(self, lam) -> "StructureData":
        return StructureData(self.model, self.alpha, self.cal.scaled(lam))

    def double_complex(self) -> "DoubleComplex":
        return double_complex(self)

    def with_alpha(self, alpha: Form) -> "StructureData":
        return StructureData(self.model, alpha, self.cal)

    def to_json(self) -> dict:
        data = self.model.to_json()
        data["alpha"] = self.alpha.to_literal()
        data["calibration"] = self.cal.to_json()
        return data


def twisted_differential(model, alpha: Form, weight) -> tuple:
    """Matrices of ``ω -> dω - weight·α∧ω`` on Λ^0..Λ^{m-1}."""
    if not alpha.is_zero() and alpha.degree() != 1:
        raise StructureError("ALPHA_DEGREE", "α must be a 1-form")
    w = Q(weight)
    m = model.dim
    out = []
    for k in range(m):
        d = model.d_matrix(k)
        if w and not alpha.is_zero():
            d = d - wedge_map(alpha, k).scale(w)
        out.append(d)
    return tuple(out)


@dataclass
class ValidationReport:
    ok: bool
    code: str = "OK"
    message: str = ""
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"ok": self.ok, "code": self.code, "message": self.message, "details": self.details}


def _coeffs(f: Form) -> dict:
    return {"".join(map(str, b)) or "1": format_rational(c) for b, c in f.terms.items()}


def validate_structure(s: StructureData) -> ValidationReport:
    model, alpha, cal = s.model, s.alpha, s.cal
    bad = model.first_nonzero_square() if hasattr(model, "first_nonzero_square") else None
    if bad is not None:
        k, blade, image = bad
        return ValidationReport(False, "D_SQUARED_NONZERO", f"d∘d ≠ 0 on Λ^{k}",
                                {"degree": k, "blade": list(blade), "image": _coeffs(image)})
    if model.dim != cal.dim or alpha.dim != cal.dim:
        return ValidationReport(False, "DIMENSION_MISMATCH", "model, α and calibration dimensions differ")
    if not alpha.is_zero() and alpha.degree() != 1:
        return ValidationReport(False, "ALPHA_DEGREE", "α must be a 1-form")
    da = model.d_form(alpha)
    if not da.is_zero():
        return ValidationReport(False, "ALPHA_NOT_CLOSED", "dα ≠ 0", {"d_alpha": _coeffs(da)})
    F = cal.form
    defect = model.d_form(F) - wedge(alpha, F) * 2
    if not defect.is_zero():
        return ValidationReport(False, "STRUCTURE_EQUATION", "dF ≠ 2α∧F", {"dF_minus_2alphaF": _coeffs(defect)})
    prof = column_profile(cal)
    if not prof.is_nondegenerate():
        return ValidationReport(False, "DEGENERATE_CALIBRATION", "calibration column profile is degenerate",
                                {"profile": list(prof.kinds())})
    return ValidationReport(True)


def require_valid(s: StructureData) -> None:
    rep = validate_structure(s)
    if not rep.ok:
        raise StructureError(rep.code, rep.message, rep.details)


def double_complex(s: StructureData, weight=2) -> DoubleComplex:
    cal = s.cal
    m, p = cal.dim, cal.degree
    dims = tuple(graded_dim(m, k) for k in range(m + 1))
    top = twisted_differential(s.model, s.alpha, weight)
    bottom = twisted_differential(s.model, s.alpha, 0)
    column = {k: wedge_map(cal.form, k - p, side="right") for k in range(p, m + 1)}
    return DoubleComplex(p, cal.iso_degree, dims, dims, top, bottom, column)


def build_extended_complex(s: StructureData) -> ExtendedComplex:
    require_valid(s)
    return extend(double_complex(s), provenance=s)


def middle_operator(s: StructureData, w: Form) -> Form:
    """The second-order zig-zag on a representative w of the middle space."""
    cal = s.cal
    m, p, c = cal.dim, cal.degree, cal.iso_degree
    mid = c + p - 1
    if not w.is_zero() and w.degree() != mid:
        raise ValueError(f"representative must have degree {mid}")
    u = s.model.d_form(w) - wedge(s.alpha, w) * 2
    col = wedge_map(cal.form, c, side="right")
    sigma = solve_many(col, Matrix.from_columns([u.to_vector(mid + 1)], col.nrows))[0]
    if sigma is None:
        raise StructureError("UNSOLVABLE", "middle zig-zag has no solution; calibration is corrupted")
    return s.model.d_form(Form.from_vector(m, c, sigma))


# ---------------------------------------------------------------------------
# symbol complexes


def symbol_double_complex(cal: Calibration, xi: Form) -> DoubleComplex:
    if xi.is_zero():
        raise ValueError("ξ must be nonzero")
    if xi.degree() != 1:
        raise ValueError("ξ must be a 1-form")
    m, p = cal.dim, cal.degree
    dims = tuple(graded_dim(m, k) for k in range(m + 1))
    d = tuple(wedge_map(xi, k) for k in range(m))
    column = {k: _right_wedge(cal, k - p) for k in range(p, m + 1)}
    return DoubleComplex(p, cal.iso_degree, dims, dims, d, d, column)


@lru_cache(maxsize=None)
def _right_wedge(cal: Calibration, k: int) -> Matrix:
    return wedge_map(cal.form, k, side="right")


def symbol_complex(cal: Calibration, xi: Form) -> CochainComplex:
    return extend(symbol_double_complex(cal, xi), check=False).cochain_complex()


def second_half_symbol_complex(cal: Calibration, xi: Form) -> CochainComplex:
    """The coeffective part alone: kernels from Λ^{c+1} to Λ^m."""
    full = symbol_complex(cal, xi)
    mid = cal.iso_degree + cal.degree - 1
    return CochainComplex(full.dims[mid + 1:], full.diffs[mid + 1:], full.labels[mid + 1:])


def exactness_defects(c: CochainComplex) -> list:
    """Positions where the complex is not exact, with the cohomology dimension."""
    from .homology import cohomology

    return [(r, d) for r, d in enumerate(cohomology(c).dims) if d]


def random_covector(m: int, rng: random.Random) -> Form:
    while True:
        comps = [rng.randint(-9, 9) for _ in range(m)]
        if any(comps):
            return Form(m, {(i + 1,): x for i, x in enumerate(comps) if x})
