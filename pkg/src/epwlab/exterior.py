"""Exterior powers, the wedge pairing on three-forms, and the subspaces built from it.

Wedge monomials are increasing index tuples (0-based internally, 1-based in
the text format) ordered lexicographically; signs come from inversion counts.
The volume form takes the value 1 on e1∧...∧en unless rescaled.

Three symplectic frames are used throughout the package:

* the 20-dimensional space of three-forms on V6 with the pairing
  (w, w') -> vol(w ∧ w');
* the 12-dimensional space V2 ⊗ ∧²V4 inside it, with V2 = <e1, e2> and
  V4 = <e3, ..., e6>;
* the 18-dimensional reduction (∧³U1)^⊥ / ∧³U1 for U1 = <e1, e2, e3> and
  U2 = <e4, e5, e6>, whose coordinates are ∧²U1 ⊗ U2 followed by U1 ⊗ ∧²U2.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from .exactlin import Field, Matrix, Subspace, kernel

__all__ = [
    "ExteriorSpace",
    "MultiVector",
    "VolumeForm",
    "SymplecticFrame",
    "wedge",
    "wedge_vectors",
    "eta_form",
    "tangent_space",
    "kummer_frame",
    "f_space",
    "f_space_spanning",
    "wedge2u_space",
    "epw_frame",
    "cone_point",
    "ConePoint",
    "wedge_sign",
    "wedge3_matrix",
]


def wedge_sign(a: Sequence[int], b: Sequence[int]) -> int:
    """Sign of sorting the concatenation a+b of two increasing disjoint tuples (0 if they meet)."""
    if set(a) & set(b):
        return 0
    inv = sum(1 for x in a for y in b if x > y)
    return -1 if inv % 2 else 1


@lru_cache(maxsize=None)
def _basis(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    return tuple(combinations(range(n), d))


@lru_cache(maxsize=None)
def _index(n: int, d: int) -> dict:
    return {m: i for i, m in enumerate(_basis(n, d))}


@dataclass(frozen=True)
class ExteriorSpace:
    """The exterior power ∧^d of an n-dimensional based space."""

    n: int
    d: int
    field: Field

    def __post_init__(self) -> None:
        if not 0 <= self.d <= self.n:
            raise ValueError("exterior degree out of range")

    @property
    def dim(self) -> int:
        return comb(self.n, self.d)

    @property
    def basis(self) -> tuple[tuple[int, ...], ...]:
        return _basis(self.n, self.d)

    def index(self, mono: Sequence[int]) -> int:
        return _index(self.n, self.d)[tuple(mono)]

    def monomial(self, mono: Sequence[int], coeff=None) -> "MultiVector":
        """Signed basis element for an index tuple in any order."""
        f = self.field
        order = sorted(range(len(mono)), key=lambda k: mono[k])
        srt = tuple(mono[k] for k in order)
        if len(set(srt)) < len(srt):
            return self.zero()
        inv = sum(1 for i in range(len(order)) for j in range(i + 1, len(order)) if order[i] > order[j])
        c = f.one if coeff is None else f(coeff)
        if inv % 2:
            c = f.neg(c)
        coords = [f.zero] * self.dim
        coords[self.index(srt)] = c
        return MultiVector(self, tuple(coords))

    def zero(self) -> "MultiVector":
        return MultiVector(self, tuple([self.field.zero] * self.dim))

    def from_vector(self, v: Sequence) -> "MultiVector":
        if self.d != 1:
            raise ValueError("from_vector needs degree 1")
        return MultiVector(self, tuple(self.field(x) if not isinstance(x, type(self.field.zero)) else x for x in v))


@dataclass(frozen=True)
class MultiVector:
    """An element of ∧^d V in the lexicographic monomial basis."""

    space: ExteriorSpace
    coords: tuple

    def __post_init__(self) -> None:
        if len(self.coords) != self.space.dim:
            raise ValueError("coordinate length differs from the space dimension")

    @property
    def degree(self) -> int:
        return self.space.d

    def __add__(self, other: "MultiVector") -> "MultiVector":
        f = self.space.field
        return MultiVector(self.space, tuple(f.add(a, b) for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "MultiVector") -> "MultiVector":
        f = self.space.field
        return MultiVector(self.space, tuple(f.sub(a, b) for a, b in zip(self.coords, other.coords)))

    def scale(self, c) -> "MultiVector":
        f = self.space.field
        return MultiVector(self.space, tuple(f.mul(c, a) for a in self.coords))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def terms(self) -> dict:
        return {m: c for m, c in zip(self.space.basis, self.coords) if c != 0}

    def to_text(self) -> str:
        """Lines "{i,j,k} : c" with 1-based indices, zero terms omitted."""
        f = self.space.field
        lines = [
            "{" + ",".join(str(i + 1) for i in m) + "} : " + f.to_str(c) for m, c in self.terms().items()
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, space: ExteriorSpace, text: str) -> "MultiVector":
        f = space.field
        coords = [f.zero] * space.dim
        for line in text.strip().splitlines():
            if not line.strip():
                continue
            mono, _, coeff = line.partition(":")
            idx = tuple(int(x) - 1 for x in mono.strip().strip("{}").split(",") if x.strip())
            term = space.monomial(idx, f.parse(coeff))
            k = next(i for i, c in enumerate(term.coords) if c != 0) if not term.is_zero() else None
            if k is not None:
                coords[k] = f.add(coords[k], term.coords[k])
        return cls(space, tuple(coords))


def wedge(a: MultiVector, b: MultiVector) -> MultiVector:
    """Exterior product; graded-anticommutative."""
    sa, sb = a.space, b.space
    if sa.n != sb.n or sa.field != sb.field:
        raise ValueError("wedge needs multivectors over the same space")
    if sa.d + sb.d > sa.n:
        raise ValueError("exterior degree overflow")
    f = sa.field
    out_space = ExteriorSpace(sa.n, sa.d + sb.d, f)
    idx = _index(sa.n, sa.d + sb.d)
    coords = [f.zero] * out_space.dim
    for m1, c1 in a.terms().items():
        for m2, c2 in b.terms().items():
            s = wedge_sign(m1, m2)
            if s == 0:
                continue
            k = idx[tuple(sorted(m1 + m2))]
            prod = f.mul(c1, c2)
            coords[k] = f.add(coords[k], prod) if s > 0 else f.sub(coords[k], prod)
    return MultiVector(out_space, tuple(coords))


def wedge_vectors(field: Field, vectors: Sequence[Sequence]) -> MultiVector:
    """The decomposable multivector v1 ∧ ... ∧ vk."""
    n = len(vectors[0])
    space1 = ExteriorSpace(n, 1, field)
    out = ExteriorSpace(n, 0, field).monomial(())
    for v in vectors:
        out = wedge(out, space1.from_vector(v))
    return out


def wedge3_matrix(m: Matrix) -> Matrix:
    """The 20x20 matrix of ∧³M on three-forms, acting on coordinate rows: row(w) -> row(∧³M w).

    M acts on column vectors of V6; the result maps the coordinate row of a
    three-form to the coordinate row of its image.
    """
    if m.shape != (6, 6):
        raise ValueError("wedge3_matrix needs a 6x6 matrix")
    f = m.field
    cols = [[m[i, j] for i in range(6)] for j in range(6)]
    rows = [list(wedge_vectors(f, [cols[i] for i in mono]).coords) for mono in _basis(6, 3)]
    return Matrix(f, rows)


@dataclass(frozen=True)
class VolumeForm:
    """vol(e1 ∧ ... ∧ en) = scale."""

    n: int
    scale: object = 1

    def __post_init__(self) -> None:
        if self.scale == 0:
            raise ValueError("volume normalisation must be nonzero")


@dataclass(frozen=True)
class SymplecticFrame:
    """A coordinate space with a nondegenerate skew Gram matrix."""

    gram: Matrix
    name: str = ""
    meta: dict = dc_field(default_factory=dict, compare=False, hash=False)

    @property
    def field(self) -> Field:
        return self.gram.field

    @property
    def dim(self) -> int:
        return self.gram.rows

    def pair(self, u: Sequence, v: Sequence):
        f = self.field
        g = self.gram
        acc = f.zero
        for i, ui in enumerate(u):
            if ui == 0:
                continue
            row = g.row(i)
            for j, vj in enumerate(v):
                if vj != 0 and row[j] != 0:
                    acc = f.add(acc, f.mul(ui, f.mul(row[j], vj)))
        return acc

    def pairing_matrix(self, rows1: Sequence[Sequence], rows2: Sequence[Sequence]) -> Matrix:
        """Matrix of pairings [pair(r1, r2)]."""
        f = self.field
        a = Matrix(f, rows1, self.dim) if rows1 else Matrix._raw(f, [], self.dim)
        b = Matrix(f, rows2, self.dim) if rows2 else Matrix._raw(f, [], self.dim)
        return a @ self.gram @ b.T

    def is_isotropic(self, s: Subspace) -> bool:
        if s.dim == 0:
            return True
        return self.pairing_matrix(s.rows(), s.rows()).is_zero()

    def is_lagrangian(self, s: Subspace) -> bool:
        return 2 * s.dim == self.dim and self.is_isotropic(s)

    def orthogonal(self, s: Subspace) -> Subspace:
        if s.dim == 0:
            return Subspace.from_rows(self.field, self.dim, Matrix.identity(self.field, self.dim).tolist())
        return kernel(Matrix(self.field, s.rows()) @ self.gram)


@lru_cache(maxsize=None)
def _eta_gram_raw(field: Field, scale) -> Matrix:
    space = ExteriorSpace(6, 3, field)
    f = field
    rows = [[f.zero] * 20 for _ in range(20)]
    for i, m1 in enumerate(space.basis):
        for j, m2 in enumerate(space.basis):
            s = wedge_sign(m1, m2)
            if s:
                rows[i][j] = f(scale) if s > 0 else f.neg(f(scale))
    return Matrix._raw(f, rows, 20)


def eta_form(field: Field, vol: VolumeForm | None = None) -> SymplecticFrame:
    """The 20×20 Gram matrix of (w, w') -> vol(w ∧ w') on three-forms of V6."""
    vol = vol or VolumeForm(6)
    if vol.n != 6:
        raise ValueError("the wedge pairing on three-forms needs a six-dimensional V")
    return SymplecticFrame(_eta_gram_raw(field, vol.scale), "three-forms")


def tangent_space(u: Subspace) -> Subspace:
    """T_U = ∧²U ∧ V inside three-forms of V6, for a 3-dimensional U."""
    if u.ambient != 6 or u.dim != 3:
        raise ValueError("tangent_space needs a 3-dimensional subspace of a 6-dimensional space")
    f = u.field
    basis = u.rows()
    space1 = ExteriorSpace(6, 1, f)
    rows = []
    for a, b in ((0, 1), (0, 2), (1, 2)):
        w2 = wedge(space1.from_vector(basis[a]), space1.from_vector(basis[b]))
        for k in range(6):
            rows.append(list(wedge(w2, space1.monomial((k,))).coords))
    return Subspace.from_rows(f, 20, rows)


# ---------------------------------------------------------------------------
# V2 ⊗ ∧²V4
# ---------------------------------------------------------------------------

PAIRS4 = tuple(combinations(range(4), 2))


@lru_cache(maxsize=None)
def _kummer_embedding(field: Field) -> Matrix:
    space = ExteriorSpace(6, 3, field)
    rows = []
    for a in range(2):
        for i, j in PAIRS4:
            rows.append(list(space.monomial((a, 2 + i, 2 + j)).coords))
    return Matrix._raw(field, rows, 20)


@lru_cache(maxsize=None)
def kummer_frame(field: Field) -> SymplecticFrame:
    """V2 ⊗ ∧²V4 with coordinates (a, {i, j}), a in V2 major, pairs lexicographic."""
    emb = _kummer_embedding(field)
    gram = emb @ _eta_gram_raw(field, 1) @ emb.T
    return SymplecticFrame(gram, "V2 x wedge2 V4", {"embedding": emb})


def _wedge2_of_vectors(field: Field, u: Sequence, v: Sequence) -> list:
    """Coordinates of u ∧ v in ∧²V4 (pairs lexicographic)."""
    return [field.sub(field.mul(u[i], v[j]), field.mul(u[j], v[i])) for i, j in PAIRS4]


def f_space_spanning(field: Field, v: Sequence) -> list[list]:
    """The 8 spanning vectors e_a ⊗ (e_i ∧ v) of F_v."""
    rows = []
    for a in range(2):
        for i in range(4):
            e = [field.zero] * 4
            e[i] = field.one
            w = _wedge2_of_vectors(field, e, v)
            row = [field.zero] * 12
            row[6 * a : 6 * a + 6] = w
            rows.append(row)
    return rows


def f_space(field: Field, v: Sequence) -> Subspace:
    """F_v = V2 ⊗ (V4 ∧ v), a 6-dimensional Lagrangian of V2 ⊗ ∧²V4."""
    v = [field(x) if not isinstance(x, type(field.zero)) else x for x in v]
    if all(x == 0 for x in v):
        raise ValueError("F_v needs a nonzero vector")
    return Subspace.from_rows(field, 12, f_space_spanning(field, v))


def wedge2u_space(field: Field, u: Sequence) -> Subspace:
    """V2 ⊗ ∧²U for the 3-space U = ker(u) of V4, with u a nonzero covector."""
    if all(x == 0 for x in u):
        raise ValueError("a hyperplane needs a nonzero covector")
    ubasis = kernel(Matrix(field, [list(u)])).rows()
    rows = []
    for a in range(2):
        for i, j in ((0, 1), (0, 2), (1, 2)):
            w = _wedge2_of_vectors(field, ubasis[i], ubasis[j])
            row = [field.zero] * 12
            row[6 * a : 6 * a + 6] = w
            rows.append(row)
    return Subspace.from_rows(field, 12, rows)


# ---------------------------------------------------------------------------
# The 18-dimensional reduction along U1 = <e1, e2, e3>
# ---------------------------------------------------------------------------

PAIRS3 = ((0, 1), (0, 2), (1, 2))


@lru_cache(maxsize=None)
def _epw_monomials() -> tuple[tuple[tuple[int, ...], int], ...]:
    """(monomial, sign) for the 18 reduced coordinates.

    First block x ⊗ y: e_a ∧ e_b ∧ e_j for pair (a, b) of U1 and j in U2.
    Second block u ⊗ w: e_a ∧ e_j ∧ e_k for a in U1 and pair (j, k) of U2.
    """
    out = []
    for a, b in PAIRS3:
        for j in range(3, 6):
            out.append(((a, b, j), 1))
    for a in range(3):
        for j, k in ((3, 4), (3, 5), (4, 5)):
            out.append(((a, j, k), 1))
    return tuple(out)


@lru_cache(maxsize=None)
def _epw_lift(field: Field) -> Matrix:
    space = ExteriorSpace(6, 3, field)
    rows = [list(space.monomial(m).coords) for m, _ in _epw_monomials()]
    return Matrix._raw(field, rows, 20)


@lru_cache(maxsize=None)
def epw_frame(field: Field) -> SymplecticFrame:
    """(∧³U1)^⊥ / ∧³U1 with coordinates ∧²U1 ⊗ U2 (first 9) then U1 ⊗ ∧²U2."""
    lift = _epw_lift(field)
    gram = lift @ _eta_gram_raw(field, 1) @ lift.T
    return SymplecticFrame(gram, "reduced three-forms", {"lift": lift})


def reduce_to_epw(field: Field, vec: Sequence) -> list:
    """Image in the 18-dim reduction of a three-form orthogonal to ∧³U1."""
    space = ExteriorSpace(6, 3, field)
    if vec[space.index((3, 4, 5))] != 0:
        raise ValueError("three-form is not orthogonal to ∧³U1")
    return [vec[space.index(m)] for m, _ in _epw_monomials()]


@dataclass(frozen=True)
class ConePoint:
    """A point of the cone over P(∧²U1) x P(U2) with vertex [U1]."""

    t: object
    x: tuple
    y: tuple
    u: Subspace
    tbar: Subspace
    is_vertex: bool = False


def _plane_for(field: Field, x: Sequence) -> tuple[list, list, list]:
    """w1, w2, w3 in U1 with w1 ∧ w2 = x and x ∧ w3 = e1∧e2∧e3."""
    f = field
    # x ∧ e_k = phi_k e123 with x = x12 e12 + x13 e13 + x23 e23
    phi = [x[2], f.neg(x[1]), x[0]]
    ker = kernel(Matrix(f, [phi])).rows()
    w1, w2 = list(ker[0]), list(ker[1])
    pl = [f.sub(f.mul(w1[a], w2[b]), f.mul(w1[b], w2[a])) for a, b in PAIRS3]
    k = next(i for i in range(3) if x[i] != 0)
    mu = f.div(pl[k], x[k])
    w2 = [f.div(c, mu) for c in w2]
    j = next(i for i in range(3) if phi[i] != 0)
    w3 = [f.zero] * 3
    w3[j] = f.inv(phi[j])
    return w1, w2, w3


def cone_point(field: Field, t, x: Sequence, y: Sequence) -> ConePoint:
    """The 3-space U with Plücker point t·∧³U1 + x ∧ y, and its reduced tangent T_U / ∧³U1.

    Passing ``t=None`` selects the vertex U = U1.
    """
    f = field
    x = tuple(f(c) if not isinstance(c, type(f.zero)) else c for c in x)
    y = tuple(f(c) if not isinstance(c, type(f.zero)) else c for c in y)
    if t is None:
        u = Subspace.coordinate(f, 6, [0, 1, 2])
        return ConePoint(None, x, y, u, _reduced_tangent(f, u), True)
    if all(c == 0 for c in x) or all(c == 0 for c in y):
        raise ValueError("cone coordinates x and y must be nonzero")
    t = f(t) if not isinstance(t, type(f.zero)) else t
    w1, w2, w3 = _plane_for(f, x)
    u3 = [f.mul(t, c) for c in w3] + list(y)
    u = Subspace.from_rows(f, 6, [w1 + [f.zero] * 3, w2 + [f.zero] * 3, u3])
    return ConePoint(t, x, y, u, _reduced_tangent(f, u))


def _reduced_tangent(field: Field, u: Subspace) -> Subspace:
    tu = tangent_space(u)
    return Subspace.from_rows(field, 18, [reduce_to_epw(field, r) for r in tu.rows()])


def cone_spanning_coefficients(field: Field, x: Sequence) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Affine dependence of a spanning set of T_U / ∧³U1 on (y, t) for fixed x.

    Returns (base, ycoef, tcoef) with shapes (18, 18), (3, 18, 18), (18, 18) so that
    the spanning rows are base + sum_j y_j ycoef[j] + t tcoef (finite fields only).
    """
    f = field
    if not f.is_finite or f.degree != 1:
        raise ValueError("cone scans run over prime fields")
    w1, w2, w3 = _plane_for(f, x)
    space1 = ExteriorSpace(6, 1, f)
    zero3 = [f.zero] * 3

    def vec(c3, c6=None):
        return space1.from_vector(list(c3) + (list(c6) if c6 is not None else zero3))

    xw = wedge(vec(w1), vec(w2))

    def rows_for(y6, t):
        u3 = vec([f.mul(t, c) for c in w3], y6)
        out = []
        for k in range(6):
            ek = space1.monomial((k,))
            out.append(reduce_to_epw(f, list(wedge(xw, ek).coords)))
            out.append(reduce_to_epw(f, list(wedge(wedge(vec(w1), u3), ek).coords)))
            out.append(reduce_to_epw(f, list(wedge(wedge(vec(w2), u3), ek).coords)))
        return np.array(out, dtype=np.int64)

    base = rows_for(zero3, f.zero)
    ycoef = []
    for j in range(3):
        e = [f.zero] * 3
        e[j] = f.one
        ycoef.append((rows_for(e, f.zero) - base) % f.p)
    tcoef = (rows_for(zero3, f.one) - base) % f.p
    return base, np.array(ycoef), tcoef
