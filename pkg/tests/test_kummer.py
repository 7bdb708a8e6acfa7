import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from epwlab.exactlin import GF, Matrix, Subspace, intersect, rank, seeded_rng
from epwlab.exterior import f_space, kummer_frame, wedge2u_space
from epwlab.ffbatch import projective_points
from epwlab.kummer import (
    delpezzo_counts,
    degeneracy_profile,
    discriminant_sextic,
    duality_check,
    is_square_binary_quartic,
    kummer_from_lagrangian,
    lagrangian_from_symmetric,
    node_scan,
    random_symmetric_lagrangian,
    split_fixture,
    symmetric_family,
)
from epwlab.lagrangian import LagrangianSubspace

F7, F11 = GF(7), GF(11)


def seeded_lagrangian(seed, f=F11):
    return random_symmetric_lagrangian(f, seeded_rng(seed, "kummer", f.p))


def direct_intersection(a, f, point, flavor):
    space = f_space(f, point) if flavor == "Fv" else wedge2u_space(f, point)
    return intersect(a.space, space).dim


@pytest.mark.parametrize("flavor", ["Fv", "wedge2U"])
@pytest.mark.parametrize("seed", [0, 1])
def test_quartic_zero_set_is_rank_predicate_on_p3_over_f7(flavor, seed):
    _, a = seeded_lagrangian(seed, F7)
    quartic = kummer_from_lagrangian(a, flavor)
    assert quartic.form.degree == 4
    pts = projective_points(F7, 4)
    zero = quartic.form.evaluate_batch(pts) == 0
    dims = degeneracy_profile(a, pts, F7, flavor)
    assert np.array_equal(zero, dims >= 1)
    # the batched predicate agrees with an independent subspace intersection
    for pt in pts[::37]:
        p = [int(c) for c in pt]
        assert direct_intersection(a, F7, p, flavor) == dims[np.all(pts == pt, axis=1)][0]


def test_coordinate_lagrangian_degenerates():
    zero = lagrangian_from_symmetric(Matrix.zeros(F11, 6, 6))
    with pytest.raises((ValueError, ArithmeticError)):
        kummer_from_lagrangian(zero, "Fv")


@given(st.integers(0, 10**6))
def test_quartic_is_independent_of_basis(seed):
    _, a = seeded_lagrangian(seed % 50)
    rng = seeded_rng(seed, "rebase")
    mix = Matrix.random(F11, 6, 6, rng)
    if rank(mix) < 6:
        return
    rebased = LagrangianSubspace(Subspace.from_matrix(mix @ Matrix(F11, [list(r) for r in a.rows()])), a.frame)
    assert kummer_from_lagrangian(rebased, "Fv").proportional(kummer_from_lagrangian(a, "Fv"))


@pytest.mark.parametrize("seed", range(3))
def test_nodes_are_singular_points_of_corank_two(seed):
    _, a = seeded_lagrangian(seed)
    quartic = kummer_from_lagrangian(a, "Fv")
    for field in (F11, F11.extension()):
        report = node_scan(a, field, quartic)
        assert report.count <= 16
        grad = [g.over(field) for g in quartic.gradient()]
        for pt in report.points:
            assert all(g(list(pt)) == 0 for g in grad)
            if field == F11:
                assert direct_intersection(a, F11, [int(c) for c in pt], "Fv") >= 2


def test_split_fixture_has_sixteen_rational_nodes():
    q = split_fixture(11)
    report = node_scan(lagrangian_from_symmetric(q))
    assert report.count == 16
    counts = delpezzo_counts(q)
    assert counts["bitangents_found"] == 28
    assert counts["line_bitangents"] == 12
    assert counts["residual_bitangents"] == 16
    assert counts["lines"] == 12


# --- the symmetric family and its discriminant ---------------------------------------------


def test_family_members_vanish_on_segre_points():
    q, _ = seeded_lagrangian(0)
    fam = symmetric_family(q)
    rng = seeded_rng(0, "segre")
    ranks = []
    for _ in range(10):
        v = [F11.random(rng) for _ in range(3)]
        qv = fam.q_v(v)
        assert qv.is_symmetric()
        ranks.append(rank(qv))
        for v2, v3 in itertools.product(projective_points(F11, 2)[:5], projective_points(F11, 3)[::17]):
            x = [int(a) * int(b) % 11 for a in v2 for b in v3]
            value = sum(x[i] * qv[i, j] * x[j] for i in range(6) for j in range(6)) % 11
            assert value == 0
        assert fam.member(v, 3).is_symmetric()
    assert ranks.count(4) >= 8 and max(ranks) <= 4


@pytest.mark.parametrize("seed", range(4))
def test_discriminant_residual_is_the_kummer_quartic(seed):
    q, a = seeded_lagrangian(seed)
    sextic, residual = discriminant_sextic(symmetric_family(q))
    assert sextic.degree == 6 and residual.degree == 4
    assert residual.proportional(kummer_from_lagrangian(a, "Fv").form)


# --- duality and del Pezzo counts -----------------------------------------------------------------


def test_duality_and_negative_control():
    _, a = seeded_lagrangian(0)
    _, other = seeded_lagrangian(1000)
    res = duality_check(a, samples=30, seed=0)
    assert res["passed"] and res["forward"]["failures"] == res["backward"]["failures"] == 0
    control = duality_check(a, samples=30, seed=0, dual=kummer_from_lagrangian(other, "wedge2U"))
    assert not control["passed"]


@pytest.mark.parametrize("seed", range(3))
def test_delpezzo_bounds(seed):
    q, _ = seeded_lagrangian(seed)
    res = delpezzo_counts(q)
    assert res["fiber_discriminant_degree"] == 6 and res["square_free"]
    assert res["bitangents_found"] <= 28
    assert res["residual_bitangents"] <= 16
    assert res["rank4_members_verified"]


def brute_square(coeffs, p):
    """Membership in {scale * r^2} by enumerating every quadratic r and nonzero scale."""
    squares = set()
    for r in itertools.product(range(p), repeat=3):
        sq = [0] * 5
        for i, x in enumerate(r):
            for j, y in enumerate(r):
                sq[i + j] = (sq[i + j] + x * y) % p
        for scale in range(1, p):
            squares.add(tuple(scale * c % p for c in sq))
    return tuple(c % p for c in coeffs) in squares


@given(st.lists(st.integers(0, 4), min_size=5, max_size=5), st.lists(st.integers(0, 4), min_size=3, max_size=3), st.booleans())
def test_square_binary_quartic_against_enumeration(coeffs, root, use_square):
    f = GF(5)
    if use_square:
        coeffs = [0] * 5
        for i, x in enumerate(root):
            for j, y in enumerate(root):
                coeffs[i + j] = (coeffs[i + j] + x * y) % 5
    if not any(coeffs):
        return
    assert is_square_binary_quartic(f, coeffs) == brute_square(coeffs, 5)
