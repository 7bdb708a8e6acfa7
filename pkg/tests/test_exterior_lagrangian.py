import itertools

from hypothesis import given
from hypothesis import strategies as st

from epwlab.exactlin import GF, QQ, Matrix, Subspace, intersect, rank, seeded_rng
from epwlab.exterior import (
    ExteriorSpace,
    cone_point,
    epw_frame,
    eta_form,
    f_space,
    kummer_frame,
    tangent_space,
    wedge,
    wedge2u_space,
    wedge_vectors,
)
from epwlab.ffbatch import projective_points
from epwlab.lagrangian import (
    _corner,
    chart_bar_tangent_from_quadric,
    chart_basis,
    chart_graph_space,
    chart_quadric,
    chart_quadric_bar,
    chart_tangent_from_quadric,
    degeneracy_rank,
    graph_lagrangian,
    graph_matrix,
    lagrangian_from_quadric,
    quadric_from_lagrangian,
)

F101 = GF(101)


def monomial_vector(field, mono, n=6):
    return list(ExteriorSpace(n, len(mono), field).monomial(mono).coords)


# --- wedge products ---------------------------------------------------------------


def test_wedge_sign_rules():
    f = F101
    e = lambda *m: ExteriorSpace(6, len(m), f).monomial(m)  # noqa: E731
    assert wedge(e(0), e(0)).is_zero()
    assert wedge(e(0, 1), e(2, 3, 4)) == wedge(e(2, 3, 4), e(0, 1))
    assert wedge(e(0), e(1)) == wedge(e(1), e(0)).scale(-1)


@given(st.integers(0, 10**6))
def test_wedge_bilinear(seed):
    f = GF(13)
    rng = seeded_rng(seed, "bilinear")
    s2, s1 = ExteriorSpace(6, 2, f), ExteriorSpace(6, 1, f)

    def rand(space):
        from epwlab.exterior import MultiVector

        return MultiVector(space, tuple(f.random(rng) for _ in range(space.dim)))

    a, a2, b = rand(s2), rand(s2), rand(s1)
    assert wedge(a + a2, b) == wedge(a, b) + wedge(a2, b)


@given(st.integers(0, 10**6))
def test_wedge_of_vectors_is_determinant_multiple(seed):
    f = GF(11)
    rng = seeded_rng(seed, "wedge-det")
    m = Matrix.random(f, 3, 3, rng)
    vecs = [list(m.row(i)) for i in range(3)]
    w = wedge_vectors(f, vecs)
    from epwlab.exactlin import det

    assert w.coords[0] == det(m).value


# --- the three-form pairing -------------------------------------------------------


def test_eta_pairing_values():
    fr = eta_form(F101)
    assert fr.pair(monomial_vector(F101, (0, 1, 2)), monomial_vector(F101, (3, 4, 5))) == 1
    rng = seeded_rng(0, "eta")
    for _ in range(10):
        w = [F101.random(rng) for _ in range(20)]
        assert fr.pair(w, w) == 0
    assert rank(fr.gram) == 20


# --- tangent spaces ---------------------------------------------------------------


@given(st.integers(0, 10**6))
def test_tangent_space_is_ten_dimensional_lagrangian(seed):
    f = GF(7)
    rng = seeded_rng(seed, "tangent")
    u = Subspace.from_matrix(Matrix.random(f, 3, 6, rng))
    if u.dim != 3:
        return
    t = tangent_space(u)
    assert t.dim == 10
    assert eta_form(f).is_lagrangian(t)


def test_tangent_space_of_coordinate_plane():
    f = F101
    u0 = Subspace.coordinate(f, 6, [0, 1, 2])
    expected = [monomial_vector(f, m) for m in itertools.combinations(range(6), 3) if len(set(m) & {0, 1, 2}) >= 2]
    assert tangent_space(u0) == Subspace.from_rows(f, 20, expected)


def test_f_spaces_are_lagrangian_on_p3_over_f7():
    f = GF(7)
    fr = kummer_frame(f)
    for v in projective_points(f, 4):
        s = f_space(f, [int(c) for c in v])
        assert s.dim == 6 and fr.is_lagrangian(s)
    v = [1, 2, 3, 4]
    assert f_space(f, v) == f_space(f, [2 * c % 7 for c in v])


def test_wedge2u_spaces_are_lagrangian():
    f = GF(7)
    fr = kummer_frame(f)
    for u in projective_points(f, 4)[::7]:
        s = wedge2u_space(f, [int(c) for c in u])
        assert s.dim == 6 and fr.is_lagrangian(s)


# --- cone points --------------------------------------------------------------------


@given(st.integers(0, 10**6))
def test_cone_point_plucker_image(seed):
    f = GF(11)
    rng = seeded_rng(seed, "cone-point")
    x = [f.random(rng) for _ in range(3)]
    y = [f.random(rng) for _ in range(3)]
    if not any(x) or not any(y):
        return
    t = f.random(rng)
    cp = cone_point(f, t, x, y)
    u1 = Subspace.coordinate(f, 6, [0, 1, 2])
    assert intersect(cp.u, u1).dim >= 2
    space3 = ExteriorSpace(6, 3, f)
    expected = space3.monomial((0, 1, 2), t)
    pairs = ((0, 1), (0, 2), (1, 2))
    for xc, (a, b) in zip(x, pairs):
        for yc, k in zip(y, (3, 4, 5)):
            expected = expected + space3.monomial((a, b, k), f.mul(xc, yc))
    plucker = wedge_vectors(f, [list(r) for r in cp.u.rows()])
    assert Subspace.from_rows(f, 20, [list(plucker.coords)]) == Subspace.from_rows(f, 20, [list(expected.coords)])
    assert epw_frame(f).is_lagrangian(cp.tbar)


def test_vertex_cone_point_is_u1():
    f = GF(11)
    cp = cone_point(f, None, [1, 0, 0], [1, 0, 0])
    assert cp.is_vertex and cp.u == Subspace.coordinate(f, 6, [0, 1, 2])


# --- graphs of symmetric maps -----------------------------------------------------------


def test_graph_of_zero_and_identity():
    f = F101
    l1, l2 = chart_basis(f)
    fr = eta_form(f)
    assert graph_lagrangian(Matrix.zeros(f, 10, 10), l1, l2, fr).space == Subspace.from_rows(f, 20, l1)
    ident = graph_lagrangian(Matrix.identity(f, 10), l1, l2, fr).space
    assert intersect(ident, Subspace.from_rows(f, 20, l1)).dim == 0
    assert intersect(ident, Subspace.from_rows(f, 20, l2)).dim == 0


def test_random_graphs_are_isotropic_and_round_trip():
    f = F101
    l1, l2 = chart_basis(f)
    fr = eta_form(f)
    rng = seeded_rng(0, "graphs")
    lags = []
    for _ in range(50):
        q = Matrix.random_symmetric(f, 10, rng)
        lag = graph_lagrangian(q, l1, l2, fr)
        assert fr.is_lagrangian(lag.space)
        assert graph_matrix(lag, l1, l2, fr) == q
        lags.append(lag)
    assert degeneracy_rank(lags[0], lags[0]) == 10
    generic = [degeneracy_rank(lags[i], lags[i + 1]) for i in range(0, 20, 2)]
    assert generic.count(0) >= 5
    assert all(degeneracy_rank(a, b) == degeneracy_rank(b, a) for a, b in zip(lags, lags[1:10]))


@given(st.integers(0, 10**6))
def test_degeneracy_rank_matches_corank_of_difference(seed):
    f = GF(13)
    l1, l2 = chart_basis(f)
    fr = eta_form(f)
    rng = seeded_rng(seed, "corank")
    q1 = Matrix.random_symmetric(f, 10, rng)
    low = Matrix.random(f, 10, 2, rng)
    q2 = q1 + low @ low.T if rng.random() < 0.5 else Matrix.random_symmetric(f, 10, rng)
    a, b = graph_lagrangian(q1, l1, l2, fr), graph_lagrangian(q2, l1, l2, fr)
    assert degeneracy_rank(a, b) == 10 - rank(q1 - q2)


# --- local charts -----------------------------------------------------------------------


def test_chart_quadric_small_cases():
    f = F101
    assert chart_quadric(Matrix.zeros(f, 3, 3)).matrix.is_zero()
    e11 = Matrix(f, [[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    q1 = chart_quadric(e11).matrix
    assert not q1.is_zero()
    assert chart_quadric(e11.scale(5)).matrix == q1.scale(5)
    assert all(q1[0, j] == 0 for j in range(10))


def test_reduced_chart_at_the_corner_is_the_cofactor_quadric():
    f = F101
    q = chart_quadric_bar(_corner(f))
    rng = seeded_rng(0, "cofactor")
    for _ in range(10):
        m = [f.random(rng) for _ in range(9)]
        cofactor = (m[4] * m[8] - m[5] * m[7]) % 101
        assert q(m) == cofactor
    corner_space = chart_graph_space(_corner(f))
    assert chart_bar_tangent_from_quadric(q) == tangent_space(corner_space)


def test_ruling_determinant_locus_matches_intersection_rank():
    from epwlab.exactlin import det
    from epwlab.lagrangian import QuadraticForm

    f = GF(13)
    rng = seeded_rng(0, "ruling-det")
    s = Matrix.random_symmetric(f, 9, rng)
    graph = chart_bar_tangent_from_quadric(QuadraticForm(s))
    u = [f.random(rng) for _ in range(3)]
    v = [f.random_nonzero(rng) for _ in range(3)]
    hits = 0
    for t in range(13):
        b = _corner(f) + Matrix(f, [[f.mul(t, f.mul(a, c)) for c in v] for a in u])
        singular = det(chart_quadric_bar(b).matrix - s).value == 0
        meets = intersect(graph, tangent_space(chart_graph_space(b))).dim >= 2
        assert singular == meets
        hits += meets
    assert hits <= 4


@given(st.integers(0, 10**6), st.sampled_from(["GF101", "GF7", "QQ"]))
def test_chart_quadric_graph_is_tangent_space(seed, kind):
    f = {"GF101": GF(101), "GF7": GF(7), "QQ": QQ}[kind]
    rng = seeded_rng(seed, "chart", kind)
    b = Matrix.random(f, 3, 3, rng)
    assert chart_tangent_from_quadric(chart_quadric(b)).space == tangent_space(chart_graph_space(b))


@given(st.integers(0, 10**6))
def test_reduced_chart_matches_tangent_space_on_cone(seed):
    f = F101
    rng = seeded_rng(seed, "bar")
    u = [f.random(rng) for _ in range(3)]
    v = [f.random(rng) for _ in range(3)]
    b = _corner(f) + Matrix(f, [[f.mul(a, c) for c in v] for a in u])
    assert chart_bar_tangent_from_quadric(chart_quadric_bar(b)) == tangent_space(chart_graph_space(b))


def test_reduced_chart_rejects_points_off_the_cone():
    f = F101
    import pytest

    with pytest.raises(ValueError):
        chart_quadric_bar(Matrix.identity(f, 3))


# --- Lagrangians from quadrics on the reduced frame ---------------------------------------


def test_lagrangian_from_quadric_examples():
    f = F101
    zero = lagrangian_from_quadric(Matrix.zeros(f, 9, 9))
    coordinate = Subspace.coordinate(f, 18, list(range(9, 18)))
    assert zero.space == coordinate
    ident = lagrangian_from_quadric(Matrix.identity(f, 9))
    assert intersect(ident.space, coordinate).dim == 0
    assert intersect(ident.space, Subspace.coordinate(f, 18, list(range(9)))).dim == 0


@given(st.integers(0, 10**6))
def test_quadric_round_trip(seed):
    f = GF(101)
    q = Matrix.random_symmetric(f, 9, seeded_rng(seed, "round-trip"))
    lag = lagrangian_from_quadric(q)
    assert epw_frame(f).is_lagrangian(lag.space)
    assert quadric_from_lagrangian(lag) == q
