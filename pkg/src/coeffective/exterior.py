"""The exterior algebra of Q^m.

Blades are strictly increasing tuples of indices in ``1..m``; a blade
``(i1, ..., ik)`` stands for ``e^{i1} ∧ ... ∧ e^{ik}``.  Same-degree blades are
ordered lexicographically, which fixes the coordinate order of every graded
piece.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping

from .qlinalg import Matrix, Q, format_rational

Blade = tuple


class DimensionError(ValueError):
    pass


class DegreeError(ValueError):
    pass


@lru_cache(maxsize=None)
def enumerate_basis(m: int, k: int) -> tuple:
    if not 0 <= k <= m:
        raise DegreeError(f"degree {k} out of range for dimension {m}")
    return tuple(combinations(range(1, m + 1), k))


@lru_cache(maxsize=None)
def basis_index(m: int, k: int) -> dict:
    return {b: i for i, b in enumerate(enumerate_basis(m, k))}


def graded_dim(m: int, k: int) -> int:
    if not 0 <= k <= m:
        return 0
    return len(enumerate_basis(m, k))


def merge_sign(a: Blade, b: Blade) -> tuple[int, Blade | None]:
    """Sign and sorted blade of ``e^a ∧ e^b``; ``(0, None)`` on a repeat."""
    if set(a) & set(b):
        return 0, None
    # count inversions between the two sorted lists
    inv = 0
    j = 0
    for x in a:
        while j < len(b) and b[j] < x:
            j += 1
        inv += j
    return (-1 if inv % 2 else 1), tuple(sorted(a + b))


class Form:
    """An element of Λ(Q^dim) with exact coefficients."""

    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms: Mapping | Iterable = ()):
        self.dim = dim
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict = {}
        for blade, c in items:
            blade = tuple(blade)
            if any(not 1 <= i <= dim for i in blade):
                raise DimensionError(f"blade {blade} not in dimension {dim}")
            if any(blade[t] >= blade[t + 1] for t in range(len(blade) - 1)):
                sign, sb = _sort_blade(blade)
                if sb is None:
                    continue
                blade, c = sb, sign * Q(c)
            c = Q(c)
            clean[blade] = clean.get(blade, Fraction(0)) + c
        self.terms = {b: c for b, c in sorted(clean.items()) if c}
        self._hash = None

    # constructors
    @classmethod
    def zero(cls, dim: int) -> "Form":
        return cls(dim)

    @classmethod
    def scalar(cls, dim: int, c=1) -> "Form":
        return cls(dim, {(): c})

    @classmethod
    def basis(cls, dim: int, *indices: int) -> "Form":
        return cls(dim, {tuple(indices): 1})

    @classmethod
    def from_vector(cls, dim: int, k: int, vec) -> "Form":
        basis = enumerate_basis(dim, k)
        if len(vec) != len(basis):
            raise DimensionError("vector length does not match Λ^k")
        return cls(dim, {b: c for b, c in zip(basis, vec) if c})

    def to_vector(self, k: int) -> tuple:
        idx = basis_index(self.dim, k)
        v = [Fraction(0)] * len(idx)
        for b, c in self.terms.items():
            if len(b) != k:
                raise DegreeError(f"form has a degree-{len(b)} term, expected degree {k}")
            v[idx[b]] = c
        return tuple(v)

    # inspection
    def degrees(self) -> set:
        return {len(b) for b in self.terms}

    def degree(self) -> int:
        """Degree of a homogeneous form (the zero form counts as degree 0)."""
        ds = self.degrees()
        if len(ds) > 1:
            raise DegreeError("inhomogeneous form")
        return ds.pop() if ds else 0

    def is_zero(self) -> bool:
        return not self.terms

    def homogeneous_part(self, k: int) -> "Form":
        return Form(self.dim, {b: c for b, c in self.terms.items() if len(b) == k})

    # algebra
    def _check(self, other: "Form"):
        if not isinstance(other, Form):
            raise TypeError("expected a Form")
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        t = dict(self.terms)
        for b, c in other.terms.items():
            t[b] = t.get(b, 0) + c
        return Form(self.dim, t)

    def __neg__(self) -> "Form":
        return Form(self.dim, {b: -c for b, c in self.terms.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __mul__(self, c) -> "Form":
        c = Q(c)
        return Form(self.dim, {b: c * v for b, v in self.terms.items()})

    __rmul__ = __mul__

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, tuple(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        if not self.terms:
            return f"Form({self.dim}, 0)"
        parts = []
        for b, c in self.terms.items():
            name = "e" + "".join(map(str, b)) if b else "1"
            parts.append(f"{format_rational(c)}*{name}")
        return f"Form({self.dim}, " + " + ".join(parts) + ")"

    # serialization
    def to_literal(self) -> list:
        return [{"blade": list(b), "coeff": format_rational(c)} for b, c in self.terms.items()]

    @classmethod
    def from_literal(cls, dim: int, literal: list) -> "Form":
        return cls(dim, [(tuple(t["blade"]), Q(str(t.get("coeff", "1")))) for t in literal])


def _sort_blade(blade: tuple) -> tuple[int, Blade | None]:
    if len(set(blade)) != len(blade):
        return 0, None
    arr = list(blade)
    sign = 1
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    return sign, tuple(arr)


def wedge(a: Form, b: Form) -> Form:
    a._check(b)
    out: dict = {}
    for ba, ca in a.terms.items():
        for bb, cb in b.terms.items():
            s, blade = merge_sign(ba, bb)
            if s:
                out[blade] = out.get(blade, 0) + s * ca * cb
    return Form(a.dim, out)


def wedge_power(f: Form, k: int) -> Form:
    out = Form.scalar(f.dim, 1)
    for _ in range(k):
        out = wedge(out, f)
    return out


def wedge_map(f: Form, k: int, side: str = "left") -> Matrix:
    """Matrix of ``F∧·`` (or ``·∧F`` with ``side="right"``) from Λ^k to Λ^{k+p}.

    Shape is ``(dim Λ^{k+p}) x (dim Λ^k)``.
    """
    p = f.degree()
    m = f.dim
    if k < 0 or k + p > m:
        raise DegreeError(f"Λ^{k} -> Λ^{k + p} out of range in dimension {m}")
    src = enumerate_basis(m, k)
    tgt = basis_index(m, k + p)
    rows: list[dict] = [{} for _ in tgt]
    for j, bk in enumerate(src):
        for bf, c in f.terms.items():
            if side == "left":
                s, blade = merge_sign(bf, bk)
            else:
                s, blade = merge_sign(bk, bf)
            if s:
                i = tgt[blade]
                rows[i][j] = rows[i].get(j, 0) + s * c
    return Matrix(len(tgt), len(src), rows)


class Bivector:
    """An antisymmetric contravariant 2-tensor ``J^{ab}`` on Q^dim."""

    __slots__ = ("dim", "entries")

    def __init__(self, dim: int, entries):
        ent = tuple(tuple(Q(x) for x in row) for row in entries)
        if len(ent) != dim or any(len(r) != dim for r in ent):
            raise DimensionError("bivector entries must be dim x dim")
        for a in range(dim):
            for b in range(dim):
                if ent[a][b] != -ent[b][a]:
                    raise ValueError("bivector entries are not antisymmetric")
        self.dim = dim
        self.entries = ent

    def __getitem__(self, ab) -> Fraction:
        a, b = ab
        return self.entries[a - 1][b - 1]

    def __eq__(self, other):
        return isinstance(other, Bivector) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    @classmethod
    def zero(cls, dim: int) -> "Bivector":
        return cls(dim, [[0] * dim for _ in range(dim)])

    @classmethod
    def inverse_of(cls, two_form: Form) -> "Bivector":
        """``J^{ab}`` with ``J_{ac} J^{bc} = δ_a^b``."""
        from .qlinalg import solve_many

        m = two_form.dim
        low = [[Fraction(0)] * m for _ in range(m)]
        for (a, b), c in two_form.homogeneous_part(2).terms.items():
            low[a - 1][b - 1] += c
            low[b - 1][a - 1] -= c
        # J_low · X = I with X = (J^up)^T
        sols = solve_many(Matrix.from_dense(low), Matrix.identity(m))
        if any(s is None for s in sols):
            raise ValueError("2-form is degenerate; no inverse bivector")
        # column b of X holds X[:, b]; J^up[b][c] = X[c][b]
        up = [[sols[b][c] for c in range(m)] for b in range(m)]
        return cls(m, up)


def interior(a: int, blade: Blade) -> tuple[int, Blade | None]:
    """``ι_{e_a} e^blade`` as (sign, blade)."""
    if a not in blade:
        return 0, None
    t = blade.index(a)
    return (-1 if t % 2 else 1), blade[:t] + blade[t + 1:]


def contract(jinv: Bivector, w: Form) -> Form:
    """Trace of a form against a bivector: ``Σ_{a<b} J^{ab} ι_{e_b} ι_{e_a} w``."""
    if jinv.dim != w.dim:
        raise DimensionError("dimension mismatch")
    if w.terms and min(w.degrees()) < 2:
        raise DegreeError("contraction needs degree >= 2")
    out: dict = {}
    m = w.dim
    for blade, c in w.terms.items():
        for a in range(1, m + 1):
            s1, b1 = interior(a, blade)
            if not s1:
                continue
            for b in range(a + 1, m + 1):
                jab = jinv[a, b]
                if not jab:
                    continue
                s2, b2 = interior(b, b1)
                if s2:
                    out[b2] = out.get(b2, 0) + s1 * s2 * jab * c
    return Form(m, out)


def contract_map(jinv: Bivector, k: int) -> Matrix:
    """Matrix of ``contract(jinv, ·)`` from Λ^k to Λ^{k-2}."""
    m = jinv.dim
    if k < 2 or k > m:
        raise DegreeError("contraction needs 2 <= k <= m")
    cols = [contract(jinv, Form(m, {b: 1})).to_vector(k - 2) for b in enumerate_basis(m, k)]
    return Matrix.from_columns(cols, graded_dim(m, k - 2))
