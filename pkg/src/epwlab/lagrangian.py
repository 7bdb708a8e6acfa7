"""Lagrangian subspaces, graphs of symmetric maps and the local quadric charts.

Graph convention: for complementary Lagrangians L1, L2 with bases (a_i), (b_k),
the graph of a symmetric matrix S consists of the vectors g_j = a_j + l_j with
l_j in L2 and pair(l_j, a_i) = S[i][j].  So L2 is identified with the dual of
L1 through l -> pair(l, .).

Chart conventions on three-forms of V6 (U0 = <e1,e2,e3>, Uinf = <e4,e5,e6>):

* U_B is the graph of B acting on column vectors, spanned by
  e_j + sum_i B[i][j] e_{3+i};
* the coordinates (m0, m11, m12, ..., m33) on T_{U0} refer to the basis
  -e1∧e2∧e3, eps_i ∧ e_{3+j} with eps = (e2∧e3, e3∧e1, e1∧e2);
* the symmetric map of a quadratic form Q is its polar form, q(x, x) = 2 Q(x).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .exactlin import Field, Matrix, Subspace, adjugate, det, intersect, rank, solve
from .exterior import (
    ExteriorSpace,
    SymplecticFrame,
    epw_frame,
    eta_form,
    tangent_space,
    wedge,
    wedge_vectors,
)

__all__ = [
    "QuadraticForm",
    "SymmetricMap",
    "LagrangianSubspace",
    "graph_lagrangian",
    "graph_matrix",
    "degeneracy_rank",
    "chart_quadric",
    "chart_quadric_bar",
    "chart_basis",
    "chart_graph_space",
    "chart_tangent_from_quadric",
    "chart_bar_frame",
    "chart_bar_tangent_from_quadric",
    "lagrangian_from_quadric",
    "quadric_from_lagrangian",
    "epw_vertex_lagrangian",
    "epw_base_lagrangian",
]


@dataclass(frozen=True)
class QuadraticForm:
    """Q(x) = x^T M x for a symmetric matrix M."""

    matrix: Matrix

    def __post_init__(self) -> None:
        if not self.matrix.is_symmetric():
            raise ValueError("quadratic form matrix must be symmetric")

    @property
    def field(self) -> Field:
        return self.matrix.field

    @property
    def dim(self) -> int:
        return self.matrix.rows

    def rank(self) -> int:
        return rank(self.matrix)

    def corank(self) -> int:
        return self.dim - self.rank()

    def __call__(self, x: Sequence):
        f = self.field
        m = self.matrix
        acc = f.zero
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            row = m.row(i)
            for j, xj in enumerate(x):
                if xj != 0 and row[j] != 0:
                    acc = f.add(acc, f.mul(row[j], f.mul(xi, xj)))
        return acc

    def restrict(self, rows: Sequence[Sequence]) -> "QuadraticForm":
        """The form pulled back along the linear map with the given image rows."""
        r = Matrix(self.field, rows, self.dim)
        return QuadraticForm(r @ self.matrix @ r.T)

    def polar(self) -> "SymmetricMap":
        """The symmetric bilinear form b with b(x, x) = 2 Q(x)."""
        return SymmetricMap(self.matrix.scale(2))


@dataclass(frozen=True)
class SymmetricMap:
    """A symmetric matrix read as a map from one Lagrangian to the dual of itself."""

    matrix: Matrix

    def __post_init__(self) -> None:
        if not self.matrix.is_symmetric():
            raise ValueError("symmetric map requires a symmetric matrix")


class LagrangianSubspace:
    """A subspace asserted isotropic of half dimension at construction."""

    __slots__ = ("space", "frame")

    def __init__(self, space: Subspace, frame: SymplecticFrame):
        if space.ambient != frame.dim or space.field != frame.field:
            raise ValueError("subspace and frame disagree on ambient dimension or field")
        if 2 * space.dim != frame.dim:
            raise ValueError(f"dimension {space.dim} is not half of {frame.dim}")
        if not frame.is_isotropic(space):
            raise ValueError("subspace is not isotropic")
        self.space = space
        self.frame = frame

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def field(self) -> Field:
        return self.space.field

    def rows(self) -> list[tuple]:
        return self.space.rows()

    def __eq__(self, other) -> bool:
        return isinstance(other, LagrangianSubspace) and self.space == other.space

    def __hash__(self) -> int:
        return hash(self.space)

    def __repr__(self) -> str:
        return f"LagrangianSubspace(dim={self.dim}, frame={self.frame.name!r})"


def _as_matrix(q) -> Matrix:
    if isinstance(q, (SymmetricMap, QuadraticForm)):
        return q.matrix
    return q


def graph_lagrangian(
    q, l1: Sequence[Sequence], l2: Sequence[Sequence], frame: SymplecticFrame
) -> LagrangianSubspace:
    """Graph of the symmetric matrix q over the basis l1, with values in span(l2)."""
    s = _as_matrix(q)
    if not s.is_symmetric():
        raise ValueError("graph_lagrangian needs a symmetric matrix")
    f = frame.field
    n = len(l1)
    if s.rows != n or len(l2) != n:
        raise ValueError("basis sizes do not match the matrix")
    r = frame.pairing_matrix(l2, l1)  # r[k][i] = pair(b_k, a_i)
    x = solve(r.T, s.T)  # x^T: rows j satisfy X r = S^T
    if x is None:
        raise ValueError("l1 and l2 are not paired nondegenerately")
    xm = x.T
    b = Matrix(f, l2)
    lpart = xm @ b
    rows = [[f.add(a, c) for a, c in zip(l1[j], lpart.row(j))] for j in range(n)]
    return LagrangianSubspace(Subspace.from_rows(f, frame.dim, rows), frame)


def graph_matrix(
    lag: LagrangianSubspace | Subspace, l1: Sequence[Sequence], l2: Sequence[Sequence], frame: SymplecticFrame
) -> Matrix:
    """Inverse of :func:`graph_lagrangian`: the symmetric matrix whose graph is lag."""
    space = lag.space if isinstance(lag, LagrangianSubspace) else lag
    f = frame.field
    n = len(l1)
    basis = Matrix(f, list(l1) + list(l2))
    coords = solve(basis.T, Matrix(f, space.rows()).T)
    if coords is None:
        raise ValueError("subspace does not lie in span(l1) + span(l2)")
    c = coords.T
    ca = c.submatrix(range(c.rows), range(n))
    g = solve(ca.T, Matrix.identity(f, n))
    if g is None or rank(ca) < n:
        raise ValueError("subspace is not a graph over l1")
    grows = g.T @ c @ basis
    s = Matrix(
        f,
        [[frame.pair([f.sub(x, y) for x, y in zip(grows.row(j), l1[j])], l1[i]) for j in range(n)] for i in range(n)],
    )
    return s


def degeneracy_rank(a: LagrangianSubspace, l: LagrangianSubspace) -> int:
    """dim(A ∩ L) for two Lagrangians of the same frame."""
    if a.frame.dim != l.frame.dim or a.field != l.field:
        raise ValueError("frame mismatch")
    return intersect(a.space, l.space).dim


# ---------------------------------------------------------------------------
# Charts on G(3, V6)
# ---------------------------------------------------------------------------

_EPS = ((1, 2), (2, 0), (0, 1))


def chart_basis(field: Field) -> tuple[list[list], list[list]]:
    """Bases of T_{U0} (coordinates m0, m11..m33) and T_{Uinf}, as three-form rows."""
    s3 = ExteriorSpace(6, 3, field)
    s2 = ExteriorSpace(6, 2, field)
    s1 = ExteriorSpace(6, 1, field)
    a = [list(s3.monomial((0, 1, 2), -1).coords)]
    for i in range(3):
        eps = s2.monomial(_EPS[i])
        for j in range(3):
            a.append(list(wedge(eps, s1.monomial((3 + j,))).coords))
    b = tangent_space(Subspace.coordinate(field, 6, [3, 4, 5])).rows()
    return a, [list(r) for r in b]


def chart_graph_space(b: Matrix) -> Subspace:
    """U_B = span(e_j + sum_i B[i][j] e_{3+i})."""
    f = b.field
    rows = []
    for j in range(3):
        row = [f.zero] * 6
        row[j] = f.one
        for i in range(3):
            row[3 + i] = b[i, j]
        rows.append(row)
    return Subspace.from_rows(f, 6, rows)


def _quadric_matrix(field: Field, n: int, terms: dict) -> Matrix:
    """Symmetric matrix of sum c * x_i x_j given as {(i, j): c} with i <= j."""
    half = field.inv(field(2))
    m = [[field.zero] * n for _ in range(n)]
    for (i, j), c in terms.items():
        if i == j:
            m[i][i] = field.add(m[i][i], c)
        else:
            h = field.mul(c, half)
            m[i][j] = field.add(m[i][j], h)
            m[j][i] = field.add(m[j][i], h)
    return Matrix(field, m)


def _adjugate_quadratic_terms(field: Field, b: Matrix, offset: int) -> dict:
    """Terms of sum_{ij} b_ij adj(M)_ij with M the 3x3 matrix of variables m_{kl}.

    adj(M)_ij is the (j, i) cofactor: (-1)^{i+j} times the minor deleting row j, column i.
    """
    terms: dict = {}

    def var(k, l):
        return offset + 3 * k + l

    for i in range(3):
        for j in range(3):
            c = b[i, j]
            if c == 0:
                continue
            rows = [r for r in range(3) if r != j]
            cols = [s for s in range(3) if s != i]
            sign = 1 if (i + j) % 2 == 0 else -1
            # minor = m[r0][c0] m[r1][c1] - m[r0][c1] m[r1][c0]
            for (ra, ca_, rb, cb, sg) in (
                (rows[0], cols[0], rows[1], cols[1], 1),
                (rows[0], cols[1], rows[1], cols[0], -1),
            ):
                u, v = sorted((var(ra, ca_), var(rb, cb)))
                coef = c if sign * sg > 0 else field.neg(c)
                terms[(u, v)] = field.add(terms.get((u, v), field.zero), coef)
    return terms


def chart_quadric(b: Matrix) -> QuadraticForm:
    """Q_U(m0, M) = sum b_ij M^{ij} + m0 sum adj(B)_ij m_ij + m0^2 det B on T_{U0}."""
    if b.shape != (3, 3):
        raise ValueError("chart_quadric needs a 3x3 matrix")
    f = b.field
    terms = _adjugate_quadratic_terms(f, b, 1)
    adj_b = adjugate(b)
    for i in range(3):
        for j in range(3):
            c = adj_b[i, j]
            if c != 0:
                key = (0, 1 + 3 * i + j)
                terms[key] = f.add(terms.get(key, f.zero), c)
    terms[(0, 0)] = f.add(terms.get((0, 0), f.zero), det(b).value)
    return QuadraticForm(_quadric_matrix(f, 10, terms))


def chart_tangent_from_quadric(q: QuadraticForm) -> LagrangianSubspace:
    """The Lagrangian of three-forms that is the graph of the polar form of q."""
    f = q.field
    a, binf = chart_basis(f)
    return graph_lagrangian(q.polar(), a, binf, eta_form(f))


def _corner(field: Field) -> Matrix:
    m = Matrix.zeros(field, 3, 3).tolist()
    m[0][0] = field.one
    return Matrix(field, m)


def chart_quadric_bar(b: Matrix) -> QuadraticForm:
    """The 9x9 form sum b_ij M^{ij} on T_{U0} / ∧³U1, for U1 the graph of the corner map E11.

    Requires rank(B - E11) <= 1, i.e. U_B lies on the cone of 3-spaces meeting U1
    in at least a plane.
    """
    if b.shape != (3, 3):
        raise ValueError("chart_quadric_bar needs a 3x3 matrix")
    f = b.field
    if rank(b - _corner(f)) > 1:
        raise ValueError("B is not on the cone chart: rank(B - E11) > 1")
    return QuadraticForm(_quadric_matrix(f, 9, _adjugate_quadratic_terms(f, b, 0)))


def chart_bar_frame(field: Field) -> tuple[list[list], list[list], list]:
    """Lifts of a basis of T_{U0}/∧³U1, a complement inside (∧³U1)^⊥, and ∧³U1."""
    a, binf = chart_basis(field)
    frame = eta_form(field)
    u1 = chart_graph_space(_corner(field))
    w = list(wedge_vectors(field, u1.rows()).coords)
    perp = Subspace.from_rows(field, 20, binf)
    orth = intersect(perp, frame.orthogonal(Subspace.from_rows(field, 20, [w])))
    return a[1:], [list(r) for r in orth.rows()], w


def chart_bar_tangent_from_quadric(q: QuadraticForm) -> Subspace:
    """span(graph of the polar form of q in the reduced chart) + ∧³U1, a 10-dim space of three-forms."""
    f = q.field
    l1, l2, w = chart_bar_frame(f)
    frame = eta_form(f)
    s = q.polar().matrix
    r = frame.pairing_matrix(l2, l1)
    x = solve(r.T, s.T)
    if x is None:
        raise ValueError("reduced chart pairing is degenerate")
    lpart = x.T @ Matrix(f, l2)
    rows = [[f.add(u, v) for u, v in zip(l1[j], lpart.row(j))] for j in range(9)]
    return Subspace.from_rows(f, 20, rows + [w])


# ---------------------------------------------------------------------------
# The reduced frame (∧³U1)^⊥/∧³U1 = (∧²U1 ⊗ U2) ⊕ (U1 ⊗ ∧²U2)
# ---------------------------------------------------------------------------


def _unit_rows(field: Field, n: int, idx: range) -> list[list]:
    rows = []
    for i in idx:
        r = [field.zero] * n
        r[i] = field.one
        rows.append(r)
    return rows


def epw_vertex_lagrangian(field: Field) -> LagrangianSubspace:
    """∧²U1 ⊗ U2, the reduced tangent space at the vertex U1."""
    return LagrangianSubspace(Subspace.from_rows(field, 18, _unit_rows(field, 18, range(9))), epw_frame(field))


def epw_base_lagrangian(field: Field) -> LagrangianSubspace:
    """U1 ⊗ ∧²U2."""
    return LagrangianSubspace(Subspace.from_rows(field, 18, _unit_rows(field, 18, range(9, 18))), epw_frame(field))


def lagrangian_from_quadric(qprime) -> LagrangianSubspace:
    """Graph of the symmetric 9x9 map Q' : U1 ⊗ ∧²U2 -> ∧²U1 ⊗ U2 (Q' = 0 gives U1 ⊗ ∧²U2)."""
    m = _as_matrix(qprime)
    if m.shape != (9, 9):
        raise ValueError("Q' must be 9x9")
    if not m.is_symmetric():
        raise ValueError("Q' must be symmetric")
    f = m.field
    return graph_lagrangian(
        m, _unit_rows(f, 18, range(9, 18)), _unit_rows(f, 18, range(9)), epw_frame(f)
    )


def quadric_from_lagrangian(lag: LagrangianSubspace) -> Matrix:
    """Read back Q' from a Lagrangian transverse to ∧²U1 ⊗ U2."""
    f = lag.field
    return graph_matrix(lag, _unit_rows(f, 18, range(9, 18)), _unit_rows(f, 18, range(9)), epw_frame(f))
