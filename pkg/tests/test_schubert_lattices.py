import itertools
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from epwlab.lattices import (
    IntLattice,
    bb_square,
    direct_sum,
    divisibility,
    e8_negative,
    fujiki_degree,
    hyperbolic,
    integer_det,
    is_equivalent,
    rank_one,
    rr_sections,
    surface_invariants,
    verify_certificate,
)
from epwlab.schubert import (
    chern_twisted,
    cone_class,
    evaluate_expression,
    giambelli,
    grassmannian,
    integrate,
    pieri,
    pr_class,
    projective,
    quotient_chern,
    tangent_lagrangian_dual_chern,
    tangent_lagrangian_dual_chern_quotient_reading,
    tangent_lagrangian_dual_chern_via_filtration,
)

G36 = grassmannian(3, 6)
SMALL_GRASSMANNIANS = [(1, 3), (2, 4), (2, 5), (3, 6), (2, 6)]


def hook_length_count(rows, cols):
    """Standard Young tableaux of a rows x cols rectangle."""
    hooks = 1
    for i in range(rows):
        for j in range(cols):
            hooks *= (rows - i - 1) + (cols - j - 1) + 1
    return factorial(rows * cols) // hooks


def partitions_in_box(k, width):
    return [p for p in itertools.product(range(width + 1), repeat=k) if all(p[i] >= p[i + 1] for i in range(k - 1))]


def schubert(ring, lam):
    parts = tuple(x for x in lam if x)
    return ring.sigma(*parts) if parts else ring.one()


# --- products and integrals -----------------------------------------------------------


def test_small_products():
    s1 = G36.sigma(1)
    assert s1 * s1 == G36.sigma(2) + G36.sigma(1, 1)
    assert pieri(G36.sigma(3, 3, 3), 1) == G36.zero()
    assert integrate(s1**9) == 42


@pytest.mark.parametrize("k,n", SMALL_GRASSMANNIANS)
def test_top_power_of_sigma1_is_hook_length_count(k, n):
    ring = grassmannian(k, n)
    assert integrate(ring.sigma(1) ** (k * (n - k))) == hook_length_count(k, n - k)


@pytest.mark.parametrize("k,n", [(2, 4), (3, 6), (2, 5)])
def test_giambelli_matches_basis_class(k, n):
    ring = grassmannian(k, n)
    for lam in partitions_in_box(k, n - k):
        if any(lam):
            assert giambelli(ring, tuple(x for x in lam if x)) == schubert(ring, lam)


@given(st.sampled_from(partitions_in_box(3, 3)), st.sampled_from(partitions_in_box(3, 3)))
def test_poincare_duality(lam, mu):
    dual = tuple(3 - x for x in reversed(lam))
    product = schubert(G36, lam) * schubert(G36, mu)
    expected = 1 if tuple(mu) == dual else 0
    if sum(lam) + sum(mu) == 9:
        assert integrate(product) == expected
    else:
        assert integrate(product) == 0


@given(
    st.lists(st.tuples(st.integers(-3, 3), st.sampled_from(partitions_in_box(3, 3))), min_size=1, max_size=3),
    st.lists(st.tuples(st.integers(-3, 3), st.sampled_from(partitions_in_box(3, 3))), min_size=1, max_size=3),
    st.sampled_from(partitions_in_box(3, 3)),
)
def test_ring_axioms(a_terms, b_terms, c_lam):
    def combo(terms):
        out = G36.zero()
        for coeff, lam in terms:
            out = out + coeff * schubert(G36, lam)
        return out

    a, b, c = combo(a_terms), combo(b_terms), schubert(G36, c_lam)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


# --- enumerative numbers --------------------------------------------------------------


def test_cone_class_and_segre_degree():
    cone = cone_class(G36)
    assert cone == G36.sigma(2) ** 2 - G36.sigma(1) * G36.sigma(3)
    # degree of the Segre embedding of P2 x P2 is binomial(4, 2)
    assert integrate(G36.sigma(1) ** 5 * cone) == 6


def test_tangent_dual_chern_class():
    c = tangent_lagrangian_dual_chern(G36)
    s1 = G36.sigma(1)
    assert c.degree_part(1) == 4 * s1
    assert c.degree_part(2) == 8 * s1**2
    assert c == tangent_lagrangian_dual_chern_via_filtration(G36)
    assert tangent_lagrangian_dual_chern_quotient_reading(G36).degree_part(1) == -2 * s1


def test_degeneracy_classes_on_p3():
    p3 = projective(3)
    h = p3.sigma(1)
    total = (p3.one() + 2 * h + 2 * h**2) ** 2
    assert pr_class(total, 1) == 4 * h
    assert pr_class(total, 2) == 16 * h**3


def test_second_degeneracy_class_on_the_cone():
    c = tangent_lagrangian_dual_chern(G36)
    s1, s2, s3 = (G36.sigma(i) for i in (1, 2, 3))
    second = pr_class(c, 2)
    assert second == 16 * s1**3 - 12 * s1 * s2 + 12 * s3
    assert integrate(s1**2 * second * cone_class(G36)) == 72
    expr = "integrate(sigma1^2*(sigma2^2-sigma1*sigma3)*(16*sigma1^3-12*sigma1*sigma2+12*sigma3))"
    assert evaluate_expression(expr, G36) == 72


def test_twist_by_trivial_line_is_identity():
    q = quotient_chern(G36)
    assert chern_twisted(q, 3, G36.zero()) == q


def test_expression_errors():
    with pytest.raises(ValueError):
        evaluate_expression("tau1", G36)
    with pytest.raises(ValueError):
        evaluate_expression("integrate(", G36)


# --- lattices ------------------------------------------------------------------------


def test_degree_and_section_formulas():
    assert fujiki_degree(4) == 48
    assert fujiki_degree(2) == 12
    assert fujiki_degree(6) == 108
    assert rr_sections(4) == 10
    assert rr_sections(2) == 6
    assert rr_sections(0) == 3


def test_hyperbolic_plane_values():
    u2 = hyperbolic(2)
    assert bb_square(u2, [1, 1]) == 4
    assert bb_square(u2, [1, 0]) == 0
    assert divisibility(u2, [1, 0]) == 2


def test_equivalence_certificates():
    diag = IntLattice.from_rows([[10, 0, 0], [0, -2, 0], [0, 0, -2]])
    target1 = direct_sum(hyperbolic(2), rank_one(-10))
    cert = is_equivalent(diag, target1, bound=6)
    assert cert is not None and verify_certificate(diag, target1, cert)
    rank3_gram = IntLattice.from_rows([[2, 4, 0], [4, 2, 0], [0, 0, -2]])
    target2 = direct_sum(hyperbolic(2), rank_one(-6))
    cert2 = is_equivalent(rank3_gram, target2, bound=6)
    assert cert2 is not None and verify_certificate(rank3_gram, target2, cert2)
    assert verify_certificate(diag, diag, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert is_equivalent(diag, target2, bound=3) is None


@given(st.lists(st.integers(-3, 3), min_size=9, max_size=9), st.sampled_from([[1, 0, 0], [0, 1, 0], [0, 0, 1]]))
def test_equivalence_finds_unimodular_conjugates(entries, _):
    base = IntLattice.from_rows([[2, 1, 0], [1, -2, 0], [0, 0, -4]])
    p = [entries[0:3], entries[3:6], entries[6:9]]
    if abs(integer_det(p)) != 1:
        return
    pt = [list(r) for r in zip(*p)]
    g2 = [[sum(pt[i][a] * base.gram[a][b] * p[b][j] for a in range(3) for b in range(3)) for j in range(3)] for i in range(3)]
    other = IntLattice.from_rows(g2)
    cert = is_equivalent(base, other, bound=6)
    if cert is not None:
        assert verify_certificate(base, other, cert)


def test_e8_is_negative_definite_unimodular():
    e8 = e8_negative()
    assert e8.is_negative_definite()
    assert e8.det() == 1
    assert all(e8.gram[i][i] == -2 for i in range(8))


@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=3, max_size=3))
def test_integer_det_matches_expansion(m):
    expected = (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )
    assert integer_det(m) == expected


def test_surface_invariants():
    f0, f = surface_invariants("F0"), surface_invariants("F")
    assert (f0.K2 + f0.c2) // 12 == f0.chi == 37
    assert (f.K2 + f.c2) // 12 == f.chi == 74
    assert f.K2 == 2 * f0.K2 and f.c2 == 2 * f0.c2
    assert f0.noether_holds() and f.noether_holds()
    with pytest.raises(ValueError):
        surface_invariants("G")
