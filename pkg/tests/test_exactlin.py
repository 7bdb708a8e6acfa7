import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from epwlab.exactlin import (
    GF,
    GF2,
    QQ,
    Matrix,
    Subspace,
    adjugate,
    det,
    format_matrix,
    intersect,
    is_prime,
    kernel,
    parse_matrix,
    rank,
    rref,
    seeded_rng,
    solve,
    sqrt_in_field,
)

PRIMES = [3, 5, 7, 11, 13, 101]


def least_nonresidue(p):
    return next(n for n in range(2, p) if pow(n, (p - 1) // 2, p) == p - 1)


def pair_mul(a, b, p, r):
    """(a0 + a1 t)(b0 + b1 t) with t^2 = r, on coordinate pairs."""
    return ((a[0] * b[0] + r * a[1] * b[1]) % p, (a[0] * b[1] + a[1] * b[0]) % p)


# --- prime fields -------------------------------------------------------------


@given(st.sampled_from(PRIMES), st.integers(), st.integers(), st.integers())
def test_prime_field_matches_modular_integers(p, a, b, c):
    f = GF(p)
    x, y, z = f(a), f(b), f(c)
    assert f.add(x, y) == (a + b) % p
    assert f.mul(x, y) == (a * b) % p
    assert f.mul(x, f.add(y, z)) == f.add(f.mul(x, y), f.mul(x, z))
    if x != 0:
        assert f.mul(x, f.inv(x)) == 1


@given(st.sampled_from([3, 7, 11, 13]), st.tuples(st.integers(0, 12), st.integers(0, 12)), st.tuples(st.integers(0, 12), st.integers(0, 12)))
def test_quadratic_extension_matches_pair_arithmetic(p, a, b):
    F = GF2(p)
    r = least_nonresidue(p)
    a = (a[0] % p, a[1] % p)
    b = (b[0] % p, b[1] % p)
    prod = F.mul(F.pair(*a), F.pair(*b))
    assert tuple(F.components(prod)) == pair_mul(a, b, p, r)
    if a != (0, 0):
        assert F.mul(F.pair(*a), F.inv(F.pair(*a))) == F.one


def test_extension_modulus_is_least_nonresidue():
    for p in [3, 5, 7, 11, 13, 101]:
        F = GF2(p)
        t = F.pair(0, 1)
        assert F.mul(t, t) == F.pair(least_nonresidue(p), 0)
        assert F.order == p * p


def test_nonprime_modulus_is_rejected():
    with pytest.raises(ValueError):
        GF(4)
    assert not is_prime(1) and is_prime(2) and not is_prime(121)


# --- square roots ---------------------------------------------------------------


def test_sqrt_small_cases():
    f = GF(11)
    assert f.sqrt(0) == 0
    assert f.sqrt(4) == 2


def test_sqrt_against_squaring_table():
    for p in [7, 11, 13]:
        f, F = GF(p), GF2(p)
        squares = {(x * x) % p for x in range(p)}
        for a in range(p):
            root = f.sqrt(a)
            if a in squares:
                assert root is not None and (root * root) % p == a
                assert root == min(x for x in range(p) if (x * x) % p == a)
            else:
                assert root is None
                big = F.sqrt(F(a))
                assert big is not None and F.mul(big, big) == F(a)


def test_sqrt_in_field_on_elements():
    f = GF(11)
    d = det(Matrix(f, [[4]]))
    assert sqrt_in_field(d) in (2, 9)
    n = det(Matrix(f, [[least_nonresidue(11)]]))
    assert sqrt_in_field(n) is None


# --- rank, kernel, intersections --------------------------------------------------


def test_rank_trivial():
    f = GF(101)
    assert rank(Matrix.identity(f, 3)) == 3
    assert rank(Matrix.zeros(f, 4, 6)) == 0


def random_graph_lagrangian(f, n, rng):
    s = Matrix.random_symmetric(f, n, rng)
    return [[f.one if j == i else f.zero for j in range(n)] + list(s.row(i)) for i in range(n)]


def test_stacked_random_lagrangians_have_full_rank():
    f = GF(101)
    rng = seeded_rng(0, "stacked")
    ranks = [rank(Matrix(f, random_graph_lagrangian(f, 10, rng) + random_graph_lagrangian(f, 10, rng))) for _ in range(10)]
    # full rank fails with probability at most 20/101 per trial
    assert ranks.count(20) >= 5
    assert all(r <= 20 for r in ranks)


def brute_kernel_size(rows, p):
    n = len(rows[0])
    return sum(
        1
        for v in itertools.product(range(p), repeat=n)
        if all(sum(a * b for a, b in zip(row, v)) % p == 0 for row in rows)
    )


@given(st.lists(st.lists(st.integers(0, 2), min_size=4, max_size=4), min_size=1, max_size=4))
def test_rank_against_brute_force_kernel_count(rows):
    f = GF(3)
    m = Matrix(f, rows)
    assert 3 ** (4 - rank(m)) == brute_kernel_size(rows, 3)
    ker = kernel(m)
    assert ker.dim == 4 - rank(m)
    for v in ker.rows():
        assert all(sum(a * b for a, b in zip(row, v)) % 3 == 0 for row in rows)


@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 6))
def test_intersection_dimension_formula(seed, d1, d2):
    f = GF(7)
    rng = seeded_rng(seed, "intersect")
    a = Matrix.random(f, d1, 6, rng)
    b = Matrix.random(f, d2, 6, rng)
    s1, s2 = Subspace.from_matrix(a), Subspace.from_matrix(b)
    inter = intersect(s1, s2)
    assert inter.dim + rank(a.vstack(b)) == s1.dim + s2.dim
    for v in inter.rows():
        assert s1.contains(v) and s2.contains(v)


def test_intersection_examples():
    f = GF(101)
    e12 = Subspace.from_rows(f, 4, [[1, 0, 0, 0], [0, 1, 0, 0]])
    e34 = Subspace.from_rows(f, 4, [[0, 0, 1, 0], [0, 0, 0, 1]])
    assert intersect(e12, e34).dim == 0
    assert intersect(e12, e12) == e12
    rng = seeded_rng(1, "generic-intersect")
    a, b = Matrix.random(f, 10, 20, rng), Matrix.random(f, 10, 20, rng)
    inter = intersect(Subspace.from_matrix(a), Subspace.from_matrix(b))
    assert inter.dim == 20 - rank(a.vstack(b)) == 0


@given(st.integers(0, 10**6))
def test_echelon_form_is_canonical(seed):
    f = GF(11)
    rng = seeded_rng(seed, "canonical")
    basis = Matrix.random(f, 3, 6, rng)
    mix = Matrix.random(f, 3, 3, rng)
    if rank(mix) < 3:
        mix = Matrix.identity(f, 3)
    assert Subspace.from_matrix(mix @ basis).rows() == Subspace.from_matrix(basis).rows()
    r1, piv1 = rref(basis)
    r2, piv2 = rref(mix @ basis)
    assert piv1 == piv2 and r1 == r2


# --- determinants ----------------------------------------------------------------


def leibniz(rows):
    n = len(rows)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        sign = (-1) ** sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Fraction(sign)
        for i in range(n):
            term *= rows[i][perm[i]]
        total += term
    return total


@given(st.lists(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), min_size=4, max_size=4), min_size=4, max_size=4))
def test_rational_det_matches_leibniz(rows):
    assert det(Matrix(QQ, rows)).value == leibniz(rows)


@given(st.integers(0, 10**6), st.sampled_from(["GF", "QQ"]))
def test_det_multiplicative_and_adjugate_identity(seed, kind):
    f = GF(101) if kind == "GF" else QQ
    rng = seeded_rng(seed, "det", kind)
    a, b = Matrix.random(f, 5, 5, rng), Matrix.random(f, 5, 5, rng)
    da, db = det(a).value, det(b).value
    assert det(a @ b).value == f.mul(da, db)
    assert a @ adjugate(a) == Matrix.identity(f, 5).scale(da)


def test_adjugate_examples():
    assert adjugate(Matrix.identity(QQ, 3)) == Matrix.identity(QQ, 3)
    m = Matrix(QQ, [[2, 1, 0], [1, 3, 1], [0, 1, 4]])
    assert m @ adjugate(m) == Matrix.identity(QQ, 3).scale(det(m).value)


def test_det_vanishes_on_stacked_degenerate_lagrangians():
    f = GF(101)
    rng = seeded_rng(2, "degenerate")
    lag = random_graph_lagrangian(f, 4, rng)
    other = [lag[0]] + random_graph_lagrangian(f, 4, rng)[1:]
    assert det(Matrix(f, lag + other)).value == 0


# --- solving and serialization ------------------------------------------------------


@given(st.integers(0, 10**6))
def test_solve_returns_a_solution_or_detects_inconsistency(seed):
    f = GF(13)
    rng = seeded_rng(seed, "solve")
    m = Matrix.random(f, 4, 3, rng)
    x = Matrix.random(f, 3, 1, rng)
    rhs = m @ x
    sol = solve(m, rhs)
    assert sol is not None and m @ sol == rhs
    bad = Matrix(f, [[1, 0], [1, 0]])
    assert solve(bad, Matrix(f, [[1], [2]])) is None


def test_parse_format_round_trip():
    for f in (GF(11), QQ):
        m = Matrix.random(f, 3, 4, seeded_rng(0, "fmt", repr(f)))
        assert parse_matrix(format_matrix(m)) == m


def test_seeded_rng_is_reproducible():
    assert seeded_rng(3, "x", 7).random() == seeded_rng(3, "x", 7).random()
    assert seeded_rng(3, "x", 7).random() != seeded_rng(4, "x", 7).random()
