import itertools
from math import comb

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from epwlab.exactlin import GF, GF2, Matrix, rank, seeded_rng
from epwlab.ffbatch import batch_ops, batch_rank, nullspace_mod, projective_points, rref_mod
from epwlab.polys import (
    Form,
    interpolate_form,
    monomials,
    poly_derivative,
    poly_divmod,
    poly_eval,
    poly_gcd,
    poly_mul,
    poly_roots,
    poly_trim,
)


def random_form(f, nvars, degree, rng):
    return Form(f, nvars, degree, [f.random(rng) for _ in monomials(nvars, degree)])


def direct_value(form, point, p):
    total = 0
    for e, c in zip(form.monomials, form.coeffs):
        term = c
        for x, k in zip(point, e):
            term = term * pow(x, k, p) % p
        total += term
    return total % p


def test_monomial_count():
    for n, d in [(3, 2), (4, 4), (4, 6), (7, 4)]:
        assert len(monomials(n, d)) == comb(n + d - 1, d)


@given(st.integers(0, 10**6))
def test_batch_evaluation_matches_direct_sum(seed):
    f = GF(11)
    rng = seeded_rng(seed, "batch-eval")
    form = random_form(f, 4, 3, rng)
    pts = np.array([[rng.randrange(11) for _ in range(4)] for _ in range(20)], dtype=np.int64)
    batch = form.evaluate_batch(pts)
    for pt, value in zip(pts, batch):
        assert value == direct_value(form, [int(c) for c in pt], 11) == form([int(c) for c in pt])


@given(st.integers(0, 10**6))
def test_interpolation_recovers_form(seed):
    f = GF(101)
    rng = seeded_rng(seed, "interp")
    form = random_form(f, 3, 4, rng)
    found = interpolate_form(f, 3, 4, form, rng)
    assert found.proportional(form)


@given(st.integers(0, 10**6))
def test_gradient_satisfies_euler_identity(seed):
    f = GF(13)
    rng = seeded_rng(seed, "euler")
    form = random_form(f, 4, 4, rng)
    pt = [rng.randrange(13) for _ in range(4)]
    lhs = sum(x * g(pt) for x, g in zip(pt, form.gradient())) % 13
    assert lhs == (4 * form(pt)) % 13


def test_text_round_trip():
    f = GF(7)
    form = random_form(f, 3, 3, seeded_rng(0, "text"))
    assert Form.from_text(f, 3, 3, form.to_text()) == form


@given(
    st.lists(st.integers(0, 12), min_size=1, max_size=6),
    st.lists(st.integers(0, 12), min_size=1, max_size=6),
)
def test_univariate_division_identity(a, b):
    f = GF(13)
    b = poly_trim(f, b)
    if not b or all(c == 0 for c in b):
        return
    q, r = poly_divmod(f, a, b)
    rebuilt = [(x + y) % 13 for x, y in itertools.zip_longest(poly_mul(f, q, b), r, fillvalue=0)]
    assert poly_trim(f, rebuilt) == poly_trim(f, a)
    assert len(poly_trim(f, r)) < len(b) or all(c == 0 for c in r)


def test_roots_gcd_and_derivative():
    f = GF(13)
    prod = poly_mul(f, poly_mul(f, [-2 % 13, 1], [-5 % 13, 1]), [-5 % 13, 1])
    assert sorted(poly_roots(f, prod)) == [2, 5]
    assert all(poly_eval(f, prod, x) == 0 for x in (2, 5))
    g = poly_gcd(f, prod, poly_derivative(f, prod))
    assert poly_roots(f, g) == [5]


# --- batch kernels -------------------------------------------------------------------


@given(st.integers(0, 10**6), st.sampled_from([7, 11]))
def test_extension_batch_ops_match_field(seed, p):
    F = GF2(p)
    ops = batch_ops(F)
    rng = seeded_rng(seed, "ops", p)
    a = np.array([F.random(rng) for _ in range(30)], dtype=np.int64)
    b = np.array([F.random(rng) for _ in range(30)], dtype=np.int64)
    assert list(ops.mul(a, b)) == [F.mul(int(x), int(y)) for x, y in zip(a, b)]
    assert list(ops.add(a, b)) == [F.add(int(x), int(y)) for x, y in zip(a, b)]
    nz = b[b != 0]
    assert list(ops.inv(nz)) == [F.inv(int(x)) for x in nz]


@given(st.integers(0, 10**6), st.sampled_from(["base", "ext"]))
def test_batch_rank_matches_scalar_rank(seed, kind):
    f = GF(7) if kind == "base" else GF2(7)
    rng = seeded_rng(seed, "batch-rank", kind)
    mats = []
    for _ in range(8):
        m = Matrix.random(f, 4, 5, rng)
        if rng.random() < 0.5:
            rows = [list(m.row(0)), list(m.row(1)), list(m.row(0)), list(m.row(1))]
            m = Matrix(f, rows)
        mats.append(m)
    arr = np.array([m.tolist() for m in mats], dtype=np.int64)
    assert list(batch_rank(arr, f)) == [rank(m) for m in mats]


def test_rref_and_nullspace_mod():
    rng = np.random.default_rng(0)
    a = rng.integers(0, 11, size=(3, 6))
    ns = nullspace_mod(a, 11)
    assert ns.shape[0] == 6 - len(rref_mod(a, 11)[1])
    assert not np.any((a @ ns.T) % 11)


def test_projective_point_count_and_normalization():
    for f in (GF(7), GF(11), GF2(3)):
        q = f.order
        pts = projective_points(f, 4)
        assert len(pts) == q**3 + q**2 + q + 1
        assert len({tuple(r) for r in pts}) == len(pts)
        for r in pts:
            lead = next(c for c in r if c != 0)
            assert lead == 1
