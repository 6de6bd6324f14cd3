"""Calibration forms: symplectic 2-forms, the G2 3-form and generic forms.

A calibration is accepted only if wedging with it has the non-degenerate
column pattern: injective in low degrees, one isomorphism, surjective above.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

from .exterior import (
    Bivector,
    DegreeError,
    Form,
    contract,
    contract_map,
    enumerate_basis,
    graded_dim,
    wedge,
    wedge_map,
    wedge_power,
)
from .qlinalg import (
    Matrix,
    Subquotient,
    image_quotient,
    kernel_basis,
    rank,
    solve_many,
)

SYMPLECTIC = "symplectic"
G2 = "g2"
GENERIC = "generic"
KINDS = (SYMPLECTIC, G2, GENERIC)

INJECTIVE = "injective"
ISOMORPHISM = "isomorphism"
SURJECTIVE = "surjective"
NEITHER = "neither"


class DegenerateCalibration(ValueError):
    def __init__(self, message: str, profile: "ColumnProfile | None" = None):
        super().__init__(message)
        self.profile = profile


@dataclass(frozen=True)
class ColumnEntry:
    k: int
    source_dim: int
    target_dim: int
    rank: int
    kind: str

    @property
    def kernel_dim(self) -> int:
        return self.source_dim - self.rank


@dataclass(frozen=True)
class ColumnProfile:
    """Classification of ``F∧·: Λ^k -> Λ^{k+p}`` for every admissible k."""

    entries: tuple

    def kinds(self) -> tuple:
        return tuple(e.kind for e in self.entries)

    def ranks(self) -> tuple:
        return tuple(e.rank for e in self.entries)

    def iso_degree(self) -> int | None:
        for e in self.entries:
            if e.kind == ISOMORPHISM:
                return e.k
        return None

    def is_nondegenerate(self) -> bool:
        """Injective run, exactly one isomorphism, surjective run."""
        kinds = self.kinds()
        if NEITHER in kinds or kinds.count(ISOMORPHISM) != 1:
            return False
        c = kinds.index(ISOMORPHISM)
        return all(x == INJECTIVE for x in kinds[:c]) and all(x == SURJECTIVE for x in kinds[c + 1:])

    def to_markdown(self) -> str:
        lines = ["| k | dim Λ^k | dim Λ^(k+p) | rank | kernel | map |", "|---|---|---|---|---|---|"]
        for e in self.entries:
            lines.append(f"| {e.k} | {e.source_dim} | {e.target_dim} | {e.rank} | {e.kernel_dim} | {e.kind} |")
        return "\n".join(lines)


def classify(rank_: int, source_dim: int, target_dim: int) -> str:
    if rank_ == source_dim == target_dim:
        return ISOMORPHISM
    if rank_ == source_dim:
        return INJECTIVE
    if rank_ == target_dim:
        return SURJECTIVE
    return NEITHER


def form_profile(f: Form) -> ColumnProfile:
    p = f.degree()
    m = f.dim
    entries = []
    for k in range(0, m - p + 1):
        r = rank(wedge_map(f, k))
        s, t = graded_dim(m, k), graded_dim(m, k + p)
        entries.append(ColumnEntry(k, s, t, r, classify(r, s, t)))
    return ColumnProfile(tuple(entries))


G2_PROFILE = (INJECTIVE, INJECTIVE, ISOMORPHISM, SURJECTIVE, SURJECTIVE)


@dataclass(frozen=True)
class Calibration:
    kind: str
    dim: int
    form: Form
    inverse: Bivector | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown calibration kind {self.kind!r}")
        if self.form.dim != self.dim:
            raise ValueError("form dimension does not match calibration dimension")
        if len(self.form.degrees()) != 1:
            raise DegreeError("calibration form must be homogeneous and nonzero")
        if self.kind == SYMPLECTIC and (self.form.degree() != 2 or self.dim % 2):
            raise DegreeError("symplectic calibration needs a 2-form in even dimension")
        if self.kind == G2 and (self.form.degree() != 3 or self.dim != 7):
            raise DegreeError("G2 calibration needs a 3-form on Q^7")
        prof = column_profile(self)
        if not prof.is_nondegenerate():
            raise DegenerateCalibration(f"degenerate {self.kind} form: {prof.kinds()}", prof)
        if self.kind == SYMPLECTIC:
            n = self.dim // 2
            if prof.iso_degree() != n - 1:
                raise DegenerateCalibration("symplectic isomorphism not at Λ^(n-1)", prof)
            if self.inverse is None:
                object.__setattr__(self, "inverse", Bivector.inverse_of(self.form))
        if self.kind == G2 and prof.kinds() != G2_PROFILE:
            raise DegenerateCalibration(f"G2 form has profile {prof.kinds()}", prof)

    @property
    def degree(self) -> int:
        return self.form.degree()

    @property
    def n(self) -> int:
        return self.dim // 2

    @property
    def iso_degree(self) -> int:
        """Source degree c where ``F∧: Λ^c -> Λ^{c+p}`` is an isomorphism."""
        return column_profile(self).iso_degree()

    def scaled(self, lam) -> "Calibration":
        return Calibration(self.kind, self.dim, self.form * lam)

    def to_json(self) -> dict:
        return {"kind": self.kind, "form": self.form.to_literal()}

    @classmethod
    def from_json(cls, dim: int, data: dict) -> "Calibration":
        return cls(data["kind"], dim, Form.from_literal(dim, data["form"]))


@lru_cache(maxsize=None)
def _profile_cached(f: Form) -> ColumnProfile:
    return form_profile(f)


def column_profile(c: Calibration) -> ColumnProfile:
    return _profile_cached(c.form)


def symplectic_form(n: int) -> Form:
    return Form(2 * n, {(2 * i - 1, 2 * i): 1 for i in range(1, n + 1)})


def standard_symplectic(n: int) -> Calibration:
    if n < 1:
        raise ValueError("n must be at least 1")
    return Calibration(SYMPLECTIC, 2 * n, symplectic_form(n))


G2_TERMS = {
    (1, 2, 3): 1,
    (1, 4, 5): 1,
    (1, 6, 7): 1,
    (2, 4, 6): 1,
    (2, 5, 7): -1,
    (3, 4, 7): -1,
    (3, 5, 6): -1,
}


def standard_g2() -> Calibration:
    # the constructor validates the full column profile
    return Calibration(G2, 7, Form(7, G2_TERMS))


# ---------------------------------------------------------------------------
# trace-free spaces

KERNEL = "kernel"
COKERNEL = "cokernel"


@dataclass(frozen=True)
class PerpSpace:
    """One realization of Λ_⊥^k.

    ``kernel``: ker(F∧: Λ^q -> Λ^{q+p}) with ``q = m - k``; ``basis`` holds the
    kernel vectors as forms.  ``cokernel``: Λ^k / F∧Λ^{k-p}; ``basis`` holds
    the chosen representatives and ``subquotient`` the projection.
    """

    label: int
    realization: str
    ambient_degree: int
    basis: tuple
    subquotient: Subquotient | None = None

    @property
    def dim(self) -> int:
        return len(self.basis)


def _perp_range(c: Calibration) -> range:
    p = c.degree
    if c.kind == SYMPLECTIC:
        return range(2, c.n + 1)
    # labels whose cokernel realization is a proper quotient and nonzero
    return range(p, c.iso_degree + p)


def perp_space(c: Calibration, k: int, side: str) -> PerpSpace:
    if k not in _perp_range(c):
        raise DegreeError(f"Λ_⊥^{k} is not defined for this calibration")
    m, p = c.dim, c.degree
    if side == KERNEL:
        q = m - k
        vecs = kernel_basis(wedge_map(c.form, q))
        return PerpSpace(k, KERNEL, q, tuple(Form.from_vector(m, q, v) for v in vecs))
    if side == COKERNEL:
        sq = image_quotient(wedge_map(c.form, k - p))
        basis = tuple(Form.from_vector(m, k, v) for v in sq.rep_basis)
        return PerpSpace(k, COKERNEL, k, basis, sq)
    raise ValueError(f"side must be {KERNEL!r} or {COKERNEL!r}")


def is_trace_free(c: Calibration, w: Form) -> bool:
    if w.is_zero() or w.degree() < 2:
        return True
    return contract(c.inverse, w).is_zero()


def primitive_basis(c: Calibration, k: int) -> list:
    """Basis of trace-free k-forms (all of Λ^k for k < 2)."""
    m = c.dim
    if k < 2:
        return [Form(m, {b: 1}) for b in enumerate_basis(m, k)]
    return [Form.from_vector(m, k, v) for v in kernel_basis(contract_map(c.inverse, k))]


def intertwiner(c: Calibration, k: int) -> Matrix:
    """Cokernel coordinates of Λ_⊥^k to kernel coordinates of Λ_⊥^k.

    A cokernel representative w is replaced by its trace-free part w_0 and
    sent to ``J^{n-k} ∧ w_0``, expressed in the kernel basis by ``solve``.
    """
    if c.kind != SYMPLECTIC:
        raise ValueError("intertwiner is defined for symplectic calibrations")
    n, m = c.n, c.dim
    cok = perp_space(c, k, COKERNEL)
    ker = perp_space(c, k, KERNEL)
    power = wedge_power(c.form, n - k)
    images = []
    for w in cok.basis:
        w0 = lepage_decompose(c, w)[0]
        images.append(wedge(power, w0).to_vector(m - k))
    kmat = Matrix.from_columns([v.to_vector(m - k) for v in ker.basis], graded_dim(m, m - k))
    sols = solve_many(kmat, Matrix.from_columns(images, graded_dim(m, m - k)))
    return Matrix.from_columns(sols, ker.dim)


@lru_cache(maxsize=None)
def _lepage_system(c: Calibration, k: int):
    m = c.dim
    blocks = []
    cols = []
    for j in range(k // 2 + 1):
        pj = wedge_power(c.form, j)
        prim = primitive_basis(c, k - 2 * j)
        blocks.append((j, len(prim), prim))
        for f in prim:
            cols.append(wedge(pj, f).to_vector(k))
    system = Matrix.from_columns(cols, graded_dim(m, k))
    # invert once: coordinates of each unit vector
    inv = solve_many(system, Matrix.identity(graded_dim(m, k)))
    if any(s is None for s in inv):
        raise ArithmeticError("Lepage system is singular")
    return blocks, Matrix.from_columns(inv, system.ncols)


def lepage_decompose(c: Calibration, w: Form) -> list:
    """Trace-free components ``(w_0, w_1, ...)`` with ``w = Σ_j J^j ∧ w_j``."""
    if c.kind != SYMPLECTIC:
        raise ValueError("Lepage decomposition needs a symplectic calibration")
    k = w.degree()
    if k > c.n:
        raise DegreeError("Lepage decomposition is only provided up to the middle degree")
    blocks, inv = _lepage_system(c, k)
    coords = inv.apply(w.to_vector(k))
    out = []
    t = 0
    for j, size, prim in blocks:
        acc = Form.zero(c.dim)
        for f, x in zip(prim, coords[t:t + size]):
            if x:
                acc = acc + f * x
        out.append(acc)
        t += size
    return out


def pairing(c: Calibration, a: Form, b: Form) -> Fraction:
    """Top-degree coefficient of ``(J^{n-k} ∧ a) ∧ b`` for trace-free k-forms."""
    if c.kind != SYMPLECTIC:
        raise ValueError("pairing is defined for symplectic calibrations")
    k = a.degree() if not a.is_zero() else b.degree()
    for x in (a, b):
        if not x.is_zero() and x.degree() != k:
            raise DegreeError("pairing needs two forms of equal degree")
        if not is_trace_free(c, x):
            raise ValueError("pairing needs trace-free arguments")
    if k > c.n:
        raise DegreeError("pairing is defined for k <= n")
    top = wedge(wedge(wedge_power(c.form, c.n - k), a), b)
    return top.terms.get(tuple(range(1, c.dim + 1)), Fraction(0))


def pairing_gram(c: Calibration, k: int) -> Matrix:
    basis = primitive_basis(c, k)
    return Matrix.from_dense([[pairing(c, a, b) for b in basis] for a in basis], len(basis))


def perp_dim_symplectic(n: int, k: int) -> int:
    return comb(2 * n, k) - (comb(2 * n, k - 2) if k >= 2 else 0)
