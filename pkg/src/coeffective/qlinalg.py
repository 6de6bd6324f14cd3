"""Exact linear algebra over the rationals.

Matrices are stored sparsely (one ``{col: Fraction}`` dict per row) and are
treated as immutable once built.  Vectors are plain tuples of ``Fraction``.

Row reduction always runs to reduced row echelon form, which is unique for a
given row space, so every derived basis (kernels, quotient representatives,
solutions) is deterministic no matter how pivots are visited.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vector = tuple  # tuple[Fraction, ...]


def Q(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


def format_rational(x: Fraction) -> str:
    x = Q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def zero_vector(n: int) -> Vector:
    return (Fraction(0),) * n


def unit_vector(n: int, i: int) -> Vector:
    v = [Fraction(0)] * n
    v[i] = Fraction(1)
    return tuple(v)


class Matrix:
    """A sparse exact matrix over Q."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[dict] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            self._rows = tuple({} for _ in range(nrows))
        else:
            if len(rows) != nrows:
                raise ValueError("row count does not match nrows")
            clean = []
            for row in rows:
                r = {}
                for j, v in row.items():
                    if not 0 <= j < ncols:
                        raise IndexError(f"column {j} out of range for {ncols} columns")
                    if v:
                        r[j] = Q(v)
                clean.append(r)
            self._rows = tuple(clean)

    @classmethod
    def _trusted(cls, nrows: int, ncols: int, rows) -> "Matrix":
        m = cls.__new__(cls)
        m.nrows = nrows
        m.ncols = ncols
        m._rows = tuple(rows)
        return m

    # construction ---------------------------------------------------------
    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls._trusted(nrows, ncols, [{} for _ in range(nrows)])

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls._trusted(n, n, [{i: Fraction(1)} for i in range(n)])

    @classmethod
    def from_dense(cls, data: Sequence[Sequence], ncols: int | None = None) -> "Matrix":
        nrows = len(data)
        if ncols is None:
            ncols = len(data[0]) if nrows else 0
        rows = []
        for row in data:
            if len(row) != ncols:
                raise ValueError("ragged dense matrix")
            rows.append({j: Q(v) for j, v in enumerate(row) if v})
        return cls._trusted(nrows, ncols, rows)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int) -> "Matrix":
        rows = [{} for _ in range(nrows)]
        for j, col in enumerate(columns):
            if len(col) != nrows:
                raise ValueError("column length does not match nrows")
            for i, v in enumerate(col):
                if v:
                    rows[i][j] = Q(v)
        return cls._trusted(nrows, len(columns), rows)

    @classmethod
    def from_sparse_columns(cls, columns: Sequence[dict], nrows: int) -> "Matrix":
        rows = [{} for _ in range(nrows)]
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    rows[i][j] = Q(v)
        return cls._trusted(nrows, len(columns), rows)

    # access ---------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(ij)
        return self._rows[i].get(j, Fraction(0))

    def row_dicts(self) -> tuple:
        return self._rows

    def row(self, i: int) -> Vector:
        r = self._rows[i]
        return tuple(r.get(j, Fraction(0)) for j in range(self.ncols))

    def column(self, j: int) -> Vector:
        return tuple(r.get(j, Fraction(0)) for r in self._rows)

    def columns(self) -> list[Vector]:
        cols = [[Fraction(0)] * self.nrows for _ in range(self.ncols)]
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                cols[j][i] = v
        return [tuple(c) for c in cols]

    def to_dense(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.nrows)]

    def nnz(self) -> int:
        return sum(len(r) for r in self._rows)

    def is_zero(self) -> bool:
        return all(not r for r in self._rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.nrows, self.ncols, tuple(tuple(sorted(r.items())) for r in self._rows)))

    def __repr__(self) -> str:
        return f"Matrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"

    # arithmetic -----------------------------------------------------------
    def transpose(self) -> "Matrix":
        rows = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                rows[j][i] = v
        return Matrix._trusted(self.ncols, self.nrows, rows)

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            orows = other._rows
            out = []
            for r in self._rows:
                acc: dict = {}
                for k, a in r.items():
                    for j, b in orows[k].items():
                        acc[j] = acc.get(j, 0) + a * b
                out.append({j: v for j, v in acc.items() if v})
            return Matrix._trusted(self.nrows, other.ncols, out)
        return self.apply(other)

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.ncols:
            raise ValueError(f"vector of length {len(v)} for {self.shape} matrix")
        return tuple(sum((a * v[j] for j, a in r.items()), Fraction(0)) for r in self._rows)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in addition")
        out = []
        for r, s in zip(self._rows, other._rows):
            acc = dict(r)
            for j, v in s.items():
                acc[j] = acc.get(j, 0) + v
            out.append({j: v for j, v in acc.items() if v})
        return Matrix._trusted(self.nrows, self.ncols, out)

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        c = Q(c)
        if not c:
            return Matrix.zeros(self.nrows, self.ncols)
        return Matrix._trusted(self.nrows, self.ncols, [{j: c * v for j, v in r.items()} for r in self._rows])

    def select_rows(self, idx: Sequence[int]) -> "Matrix":
        return Matrix._trusted(len(idx), self.ncols, [self._rows[i] for i in idx])

    def select_columns(self, idx: Sequence[int]) -> "Matrix":
        pos = {j: t for t, j in enumerate(idx)}
        out = [{pos[j]: v for j, v in r.items() if j in pos} for r in self._rows]
        return Matrix._trusted(self.nrows, len(idx), out)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise ValueError("row mismatch in hstack")
        off = self.ncols
        out = []
        for r, s in zip(self._rows, other._rows):
            row = dict(r)
            row.update({off + j: v for j, v in s.items()})
            out.append(row)
        return Matrix._trusted(self.nrows, self.ncols + other.ncols, out)

    def kron_identity(self, n: int) -> "Matrix":
        """``self ⊗ I_n`` with index ``(i, t) -> i*n + t``."""
        rows = []
        for r in self._rows:
            for t in range(n):
                rows.append({j * n + t: v for j, v in r.items()})
        return Matrix._trusted(self.nrows * n, self.ncols * n, rows)

    def to_strings(self) -> list[list[str]]:
        return [[format_rational(x) for x in self.row(i)] for i in range(self.nrows)]


# ---------------------------------------------------------------------------
# row reduction


def _rref_rows(rows: Iterable[dict], ncols: int) -> tuple[list[dict], list[int]]:
    """Reduced row echelon form of the span of ``rows``.

    Returns the nonzero RREF rows sorted by pivot column and their pivots.
    """
    pivots: dict[int, dict] = {}
    for src in rows:
        r = {j: v for j, v in src.items() if v}
        while r:
            c = min(r)
            p = pivots.get(c)
            if p is None:
                lead = r[c]
                if lead != 1:
                    inv = 1 / lead
                    r = {j: v * inv for j, v in r.items()}
                pivots[c] = r
                break
            f = r[c]
            for j, v in p.items():
                nv = r.get(j, 0) - f * v
                if nv:
                    r[j] = nv
                else:
                    r.pop(j, None)
    order = sorted(pivots)
    # back substitution, last pivot first
    for t in range(len(order) - 1, -1, -1):
        c = order[t]
        prow = pivots[c]
        for c2 in order[:t]:
            r = pivots[c2]
            f = r.get(c)
            if f:
                for j, v in prow.items():
                    nv = r.get(j, 0) - f * v
                    if nv:
                        r[j] = nv
                    else:
                        r.pop(j, None)
    return [pivots[c] for c in order], order


def _int_row(r: dict) -> dict:
    den = 1
    for v in r.values():
        d = v.denominator if isinstance(v, Fraction) else 1
        den = den * d // gcd(den, d)
    return {j: int(v * den) for j, v in r.items() if v}


def _int_rank(rows: Iterable[dict]) -> int:
    """Rank by fraction-free elimination on integer rows (content-normalized)."""
    pivots: dict[int, dict] = {}
    for src in rows:
        r = _int_row(src)
        while r:
            c = min(r)
            p = pivots.get(c)
            if p is None:
                g = 0
                for v in r.values():
                    g = gcd(g, v)
                if g > 1:
                    r = {j: v // g for j, v in r.items()}
                pivots[c] = r
                break
            a = p[c]
            b = r[c]
            g = gcd(a, b)
            a //= g
            b //= g
            new = {j: a * v for j, v in r.items()}
            for j, v in p.items():
                nv = new.get(j, 0) - b * v
                if nv:
                    new[j] = nv
                else:
                    new.pop(j, None)
            if new:
                g = 0
                for v in new.values():
                    g = gcd(g, v)
                    if g == 1:
                        break
                if g > 1:
                    new = {j: v // g for j, v in new.items()}
            r = new
    return len(pivots)


def rank(m: Matrix) -> int:
    """Rank over Q."""
    if m.nrows == 0 or m.ncols == 0:
        return 0
    rows = m.row_dicts()
    # eliminate along the shorter side
    if m.nrows > m.ncols:
        rows = m.transpose().row_dicts()
    return _int_rank(rows)


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    rows, piv = _rref_rows(m.row_dicts(), m.ncols)
    return Matrix._trusted(len(rows), m.ncols, rows), piv


def kernel_basis(m: Matrix) -> list[Vector]:
    """Basis of the right kernel, one vector per free column of the RREF.

    Each vector has a 1 in its free column and 0 in the other free columns.
    """
    rows, piv = _rref_rows(m.row_dicts(), m.ncols)
    pivset = set(piv)
    free = [j for j in range(m.ncols) if j not in pivset]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.ncols
        v[f] = Fraction(1)
        for r, p in zip(rows, piv):
            x = r.get(f)
            if x:
                v[p] = -x
        basis.append(tuple(v))
    return basis


def kernel_free_columns(m: Matrix) -> list[int]:
    _, piv = _rref_rows(m.row_dicts(), m.ncols)
    pivset = set(piv)
    return [j for j in range(m.ncols) if j not in pivset]


def solve_many(m: Matrix, rhs: Matrix) -> list[Vector | None]:
    """Solve ``m x = b`` for every column ``b`` of ``rhs``.

    Each entry is a solution (free variables set to zero) or ``None``.
    """
    if rhs.nrows != m.nrows:
        raise ValueError("right-hand side has the wrong number of rows")
    n = m.ncols
    aug = m.hstack(rhs)
    rows, piv = _rref_rows(aug.row_dicts(), aug.ncols)
    out = []
    for t in range(rhs.ncols):
        col = n + t
        x = [Fraction(0)] * n
        ok = True
        for r, p in zip(rows, piv):
            if p >= n:
                if r.get(col):
                    ok = False
                    break
                continue
            v = r.get(col)
            if v:
                x[p] = v
        out.append(tuple(x) if ok else None)
    return out


def solve(m: Matrix, b: Sequence) -> Vector | None:
    """Some ``x`` with ``m x = b``, or ``None`` when ``b`` is not in the image."""
    if len(b) != m.nrows:
        raise ValueError("b has the wrong length")
    return solve_many(m, Matrix.from_columns([tuple(b)], m.nrows))[0]


def column_space_basis(vectors: Sequence[Sequence], dim: int) -> list[Vector]:
    """RREF basis of the span of ``vectors``."""
    rows, _ = _rref_rows(({j: Q(v) for j, v in enumerate(vec) if v} for vec in vectors), dim)
    return [tuple(r.get(j, Fraction(0)) for j in range(dim)) for r in rows]


def span_rank(vectors: Sequence[Sequence]) -> int:
    return _int_rank({j: Q(v) for j, v in enumerate(vec) if v} for vec in vectors)


@dataclass(frozen=True)
class Subquotient:
    """``Q^ambient_dim`` modulo the span of ``sub_basis``.

    ``rep_basis`` are the unit vectors on the non-pivot coordinates of the
    RREF of the subspace and ``project`` sends ambient vectors to coordinates
    on those representatives.
    """

    ambient_dim: int
    sub_basis: tuple
    rep_basis: tuple
    rep_indices: tuple
    project: Matrix

    @property
    def dim(self) -> int:
        return len(self.rep_indices)

    def inclusion(self) -> Matrix:
        return Matrix.from_sparse_columns([{i: 1} for i in self.rep_indices], self.ambient_dim)

    def sub_matrix(self) -> Matrix:
        return Matrix.from_columns(list(self.sub_basis), self.ambient_dim)


def quotient_from_rows(ambient_dim: int, rows: Iterable[dict]) -> Subquotient:
    ref, piv = _rref_rows(rows, ambient_dim)
    pivset = set(piv)
    reps = [j for j in range(ambient_dim) if j not in pivset]
    pos = {j: t for t, j in enumerate(reps)}
    prow: list[dict] = [{j: Fraction(1)} for j in reps]
    for r, p in zip(ref, piv):
        for j, v in r.items():
            t = pos.get(j)
            if t is not None:
                prow[t][p] = -v
    project = Matrix._trusted(len(reps), ambient_dim, prow)
    sub = tuple(tuple(r.get(j, Fraction(0)) for j in range(ambient_dim)) for r in ref)
    rep_basis = tuple(unit_vector(ambient_dim, j) for j in reps)
    return Subquotient(ambient_dim, sub, rep_basis, tuple(reps), project)


def quotient(ambient_dim: int, sub: Sequence[Sequence]) -> Subquotient:
    for v in sub:
        if len(v) != ambient_dim:
            raise ValueError("subspace vector has the wrong length")
    return quotient_from_rows(ambient_dim, ({j: Q(x) for j, x in enumerate(v) if x} for v in sub))


def image_quotient(m: Matrix) -> Subquotient:
    """Cokernel of ``m``: its target modulo its column space."""
    return quotient_from_rows(m.nrows, m.transpose().row_dicts())
