"""Cohomology of finite cochain complexes and the long-exact-sequence predictor."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .qlinalg import Matrix, kernel_basis, rank, solve_many, span_rank


class ComplexError(ValueError):
    pass


@dataclass(frozen=True)
class CochainComplex:
    """Spaces ``C^0..C^N`` (by dimension) with ``diffs[r]: C^r -> C^{r+1}``."""

    dims: tuple
    diffs: tuple
    labels: tuple = ()

    def __post_init__(self):
        if len(self.diffs) != max(len(self.dims) - 1, 0):
            raise ComplexError("need one differential between each pair of consecutive spaces")
        for r, d in enumerate(self.diffs):
            if d.shape != (self.dims[r + 1], self.dims[r]):
                raise ComplexError(f"differential {r} has shape {d.shape}, expected "
                                   f"{(self.dims[r + 1], self.dims[r])}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(r) for r in range(len(self.dims))))

    def __len__(self) -> int:
        return len(self.dims)

    def squares_to_zero(self) -> bool:
        return all((self.diffs[r + 1] @ self.diffs[r]).is_zero() for r in range(len(self.diffs) - 1))

    def first_nonzero_square(self) -> int | None:
        for r in range(len(self.diffs) - 1):
            if not (self.diffs[r + 1] @ self.diffs[r]).is_zero():
                return r
        return None

    def euler_characteristic(self) -> int:
        return sum((-1) ** r * d for r, d in enumerate(self.dims))

    def ranks(self) -> tuple:
        return tuple(rank(d) for d in self.diffs)


@dataclass
class CohomologyTable:
    """Per-degree cohomology dimensions, optionally with generators.

    ``generators[r]`` are cocycles whose classes form a basis of H^r;
    ``boundaries[r]`` spans the coboundaries in degree r.
    """

    dims: tuple
    generators: tuple | None = None
    boundaries: tuple | None = None
    space_dims: tuple = ()

    def __getitem__(self, r: int) -> int:
        if 0 <= r < len(self.dims):
            return self.dims[r]
        return 0

    def __len__(self):
        return len(self.dims)

    def euler_characteristic(self) -> int:
        return sum((-1) ** r * d for r, d in enumerate(self.dims))

    def class_coordinates(self, r: int, cocycle: Sequence) -> tuple:
        """Coordinates of the class of ``cocycle`` in the generator basis."""
        if self.generators is None:
            raise ValueError("table was computed without generators")
        gens = self.generators[r]
        bnd = self.boundaries[r]
        n = self.space_dims[r]
        cols = list(bnd) + list(gens)
        if not cols:
            if any(cocycle):
                raise ValueError("vector is not a cocycle")
            return ()
        m = Matrix.from_columns(cols, n)
        sol = solve_many(m, Matrix.from_columns([tuple(cocycle)], n))[0]
        if sol is None:
            raise ValueError(f"vector is not a cocycle in degree {r}")
        return tuple(sol[len(bnd):])


def cohomology(c: CochainComplex, generators: bool = False) -> CohomologyTable:
    ranks = c.ranks()
    dims = []
    for r, n in enumerate(c.dims):
        out_rank = ranks[r] if r < len(ranks) else 0
        in_rank = ranks[r - 1] if r >= 1 else 0
        dims.append(n - out_rank - in_rank)
    if not generators:
        return CohomologyTable(tuple(dims), space_dims=tuple(c.dims))
    gens, bnds = [], []
    for r, n in enumerate(c.dims):
        if r < len(c.diffs):
            cycles = kernel_basis(c.diffs[r])
        else:
            cycles = [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
        boundary = c.diffs[r - 1].columns() if r >= 1 else []
        # keep only independent boundary columns
        basis_b: list = []
        for v in boundary:
            if any(v) and span_rank(basis_b + [v]) > len(basis_b):
                basis_b.append(v)
        chosen: list = []
        for z in cycles:
            if span_rank(basis_b + chosen + [z]) > len(basis_b) + len(chosen):
                chosen.append(z)
        if len(chosen) != dims[r]:
            raise ComplexError(f"generator count {len(chosen)} != dimension {dims[r]} in degree {r}")
        gens.append(tuple(chosen))
        bnds.append(tuple(basis_b))
    return CohomologyTable(tuple(dims), tuple(gens), tuple(bnds), tuple(c.dims))


def cup_map(source: CohomologyTable, target: CohomologyTable, r: int, mult: Matrix, shift: int) -> Matrix:
    """Matrix of ``[ω] -> [cls ∧ ω]`` from ``H^r(source)`` to ``H^{r+shift}(target)``.

    ``mult`` is the cochain-level multiplication by the class.  Raises if the
    image of a coboundary is not a coboundary.
    """
    s = r + shift
    if mult.shape != (target.space_dims[s], source.space_dims[r]):
        raise ValueError("multiplication matrix has the wrong shape")
    for b in source.boundaries[r]:
        img = mult.apply(b)
        if any(img) and target.class_coordinates(s, img) != (0,) * target[s]:
            raise ValueError("class does not preserve coboundaries (not closed)")
    cols = [target.class_coordinates(s, mult.apply(g)) for g in source.generators[r]]
    return Matrix.from_columns(cols, target[s])


KIND_SHIFT = {"symplectic": 2, "g2": 3}


@dataclass
class LESReport:
    """Cohomology of the extended complex predicted from the long exact sequence."""

    kind: str
    plain: tuple
    twisted: tuple
    delta_ranks: dict
    predicted: tuple
    identifications: list = field(default_factory=list)

    def euler_characteristic(self) -> int:
        return sum((-1) ** r * d for r, d in enumerate(self.predicted))

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "betti_plain": list(self.plain),
            "betti_twisted": list(self.twisted),
            "delta_ranks": {str(k): v for k, v in sorted(self.delta_ranks.items())},
            "predicted": list(self.predicted),
            "identifications": list(self.identifications),
        }


def _dims(t) -> tuple:
    return tuple(t.dims) if isinstance(t, CohomologyTable) else tuple(t)


def les_predict(kind: str, plain, twisted, cups: dict, n: int | None = None) -> LESReport:
    """Predict ``dim H^r`` of the extended complex from de Rham data.

    ``cups[r]`` is the matrix of the connecting map ``H^r(plain) ->
    H^{r+p}(twisted)`` (cup product with the class of the calibration form).
    Every degree is ``dim coker(δ into H^r(twisted)) + dim ker(δ out of
    H^{r-p+1}(plain))``; degrees outside ``0..m`` contribute zero.
    """
    if kind == "symplectic":
        if n is None:
            raise ValueError("symplectic prediction needs n")
        m, p = 2 * n, 2
    elif kind == "g2":
        m, p = 7, 3
    else:
        raise ValueError(f"unknown kind {kind!r}")
    b = _dims(plain)
    h = _dims(twisted)
    if len(b) != m + 1 or len(h) != m + 1:
        raise ValueError(f"expected Betti vectors of length {m + 1}")

    def get(v, r):
        return v[r] if 0 <= r <= m else 0

    delta_ranks = {}
    for r in range(0, m + 1):
        if r + p > m:
            continue
        mat = cups.get(r)
        if mat is None:
            raise ValueError(f"missing connecting map out of degree {r}")
        if mat.shape != (h[r + p], b[r]):
            raise ValueError(f"connecting map out of degree {r} has shape {mat.shape}, "
                             f"expected {(h[r + p], b[r])}")
        delta_ranks[r] = rank(mat)

    def drank(r):
        return delta_ranks.get(r, 0)

    predicted = []
    for r in range(m + p):
        coker = get(h, r) - drank(r - p)
        ker = get(b, r - p + 1) - drank(r - p + 1)
        predicted.append(coker + ker)

    top = m + p - 1
    if kind == "symplectic":
        ident = [f"H^0 = H^0(H0) = {h[0]}", f"H^{top} = H^{m}(R) = {b[m]}"]
    else:
        ident = [f"H^0 = H^0(H0) = {h[0]}", f"H^1 = H^1(H0) = {h[1]}",
                 f"H^8 = H^6(R) = {b[6]}", f"H^9 = H^7(R) = {b[7]}"]
    return LESReport(kind, b, h, delta_ranks, tuple(predicted), ident)


def row_tables(dc) -> tuple[CohomologyTable, CohomologyTable]:
    """(plain, twisted) cohomology with generators: bottom and top rows."""
    top, bottom = dc.rows()
    return cohomology(bottom, generators=True), cohomology(top, generators=True)


def connecting_maps(dc, plain: CohomologyTable, twisted: CohomologyTable) -> dict:
    """δ: H^r(plain) -> H^{r+p}(twisted) induced by the column maps."""
    p, m = dc.p, dc.m
    return {r: cup_map(plain, twisted, r, dc.column[r + p], p) for r in range(0, m - p + 1)}


def les_from_double(dc, kind: str, n: int | None = None) -> LESReport:
    plain, twisted = row_tables(dc)
    return les_predict(kind, plain, twisted, connecting_maps(dc, plain, twisted), n=n)
