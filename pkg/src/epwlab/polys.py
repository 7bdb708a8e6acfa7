"""Homogeneous forms, exact interpolation and univariate root scans."""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Callable, Iterable, Sequence

import numpy as np

from .exactlin import Field, FieldElem, Matrix, _is_raw, kernel, solve
from .ffbatch import batch_ops, nullspace_mod

__all__ = [
    "monomials",
    "Form",
    "interpolate_form",
    "vanishing_forms",
    "poly_eval",
    "poly_roots",
    "poly_mul",
    "poly_trim",
    "poly_divmod",
    "poly_gcd",
    "poly_derivative",
]

Exponent = tuple[int, ...]


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> tuple[Exponent, ...]:
    """Exponent vectors of the given degree in lexicographic order (x0^d first)."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return tuple(sorted(out, reverse=True))


def _mono_value(field: Field, e: Exponent, point: Sequence):
    v = field.one
    for x, k in zip(point, e):
        if k:
            v = field.mul(v, field.pow(x, k))
    return v


def _mono_name(e: Exponent) -> str:
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(f"x{i}")
        elif k > 1:
            parts.append(f"x{i}^{k}")
    return "*".join(parts) if parts else "1"


def _parse_mono(s: str, nvars: int) -> Exponent:
    e = [0] * nvars
    s = s.strip()
    if s == "1":
        return tuple(e)
    for part in s.split("*"):
        name, _, power = part.partition("^")
        e[int(name.strip()[1:])] += int(power) if power else 1
    return tuple(e)


class Form:
    """A homogeneous polynomial stored as a dense coefficient vector."""

    __slots__ = ("field", "nvars", "degree", "coeffs")

    def __init__(self, field: Field, nvars: int, degree: int, coeffs: Sequence):
        mons = monomials(nvars, degree)
        if len(coeffs) != len(mons):
            raise ValueError(f"expected {len(mons)} coefficients, got {len(coeffs)}")
        self.field = field
        self.nvars = nvars
        self.degree = degree
        self.coeffs = tuple(coeffs)

    @classmethod
    def from_dict(cls, field: Field, nvars: int, degree: int, terms: dict) -> "Form":
        index = {e: i for i, e in enumerate(monomials(nvars, degree))}
        c = [field.zero] * len(index)
        for e, v in terms.items():
            c[index[tuple(e)]] = field.add(c[index[tuple(e)]], v)
        return cls(field, nvars, degree, c)

    @property
    def monomials(self) -> tuple[Exponent, ...]:
        return monomials(self.nvars, self.degree)

    def terms(self) -> dict:
        return {e: c for e, c in zip(self.monomials, self.coeffs) if c != 0}

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Form)
            and (self.field, self.nvars, self.degree, self.coeffs)
            == (other.field, other.nvars, other.degree, other.coeffs)
        )

    def __hash__(self) -> int:
        return hash((self.field, self.nvars, self.degree, self.coeffs))

    def __repr__(self) -> str:
        return f"Form(deg={self.degree}, nvars={self.nvars}, terms={len(self.terms())}, {self.field!r})"

    # ----- evaluation ----------------------------------------------------
    def __call__(self, point: Sequence):
        f = self.field
        pt = [f(x) if isinstance(x, (int, FieldElem)) and not _raw_ok(f, x) else x for x in point]
        acc = f.zero
        for e, c in zip(self.monomials, self.coeffs):
            if c != 0:
                acc = f.add(acc, f.mul(c, _mono_value(f, e, pt)))
        return acc

    def evaluate_batch(self, points: np.ndarray) -> np.ndarray:
        """Values at an (N, nvars) array of encoded finite-field points."""
        ops = batch_ops(self.field)
        pts = np.asarray(points, dtype=np.int64)
        powers = [[np.ones(len(pts), dtype=np.int64)] for _ in range(self.nvars)]
        for i in range(self.nvars):
            for _ in range(self.degree):
                powers[i].append(ops.mul(powers[i][-1], pts[:, i]))
        acc = np.zeros(len(pts), dtype=np.int64)
        for e, c in zip(self.monomials, self.coeffs):
            if c == 0:
                continue
            term = np.full(len(pts), c, dtype=np.int64)
            for i, k in enumerate(e):
                if k:
                    term = ops.mul(term, powers[i][k])
            acc = ops.add(acc, term)
        return acc

    # ----- algebra -------------------------------------------------------
    def scale(self, c) -> "Form":
        f = self.field
        return Form(f, self.nvars, self.degree, [f.mul(c, x) for x in self.coeffs])

    def normalized(self) -> "Form":
        """Scaled so that the first nonzero coefficient is 1."""
        lead = next((c for c in self.coeffs if c != 0), None)
        if lead is None:
            return self
        return self.scale(self.field.inv(lead))

    def proportional(self, other: "Form") -> bool:
        """True if both forms are nonzero and equal up to a nonzero scalar."""
        if (self.nvars, self.degree) != (other.nvars, other.degree):
            return False
        if self.is_zero() or other.is_zero():
            return False
        return self.normalized().coeffs == other.normalized().coeffs

    def __mul__(self, other: "Form") -> "Form":
        f = self.field
        out: dict = {}
        for e1, c1 in self.terms().items():
            for e2, c2 in other.terms().items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = f.add(out.get(e, f.zero), f.mul(c1, c2))
        return Form.from_dict(f, self.nvars, self.degree + other.degree, out)

    def __add__(self, other: "Form") -> "Form":
        f = self.field
        return Form(f, self.nvars, self.degree, [f.add(a, b) for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "Form") -> "Form":
        f = self.field
        return Form(f, self.nvars, self.degree, [f.sub(a, b) for a, b in zip(self.coeffs, other.coeffs)])

    def over(self, field: Field) -> "Form":
        """The same form read over an extension sharing the raw encoding of base elements."""
        if field.p != self.field.p or field.degree % self.field.degree:
            raise ValueError(f"{field!r} does not contain {self.field!r}")
        return Form(field, self.nvars, self.degree, self.coeffs)

    def derivative(self, i: int) -> "Form":
        f = self.field
        out: dict = {}
        for e, c in self.terms().items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = f.mul(c, f(e[i]))
        return Form.from_dict(f, self.nvars, self.degree - 1, out)

    def gradient(self) -> list["Form"]:
        return [self.derivative(i) for i in range(self.nvars)]

    def divide_by_monomial(self, e: Exponent) -> "Form":
        """Exact quotient by a monomial; raises if the division is not exact."""
        f = self.field
        out: dict = {}
        for m, c in self.terms().items():
            q = tuple(a - b for a, b in zip(m, e))
            if min(q) < 0:
                raise ArithmeticError("monomial does not divide the form")
            out[q] = c
        return Form.from_dict(f, self.nvars, self.degree - sum(e), out)

    def compose_linear(self, columns: Sequence[Sequence]) -> "Form":
        """Substitute x_i = sum_j columns[i][j] * y_j and return the form in y."""
        f = self.field
        m = len(columns[0]) if columns else 0
        lin = [{tuple(1 if k == j else 0 for k in range(m)): f(c) if not _raw_ok(f, c) else c
                for j, c in enumerate(col) if c != 0} for col in columns]
        out: dict = {}
        for e, c in self.terms().items():
            prod = {tuple([0] * m): c}
            for i, k in enumerate(e):
                for _ in range(k):
                    prod = _sparse_mul(f, prod, lin[i])
            for mono, v in prod.items():
                out[mono] = f.add(out.get(mono, f.zero), v)
        return Form.from_dict(f, m, self.degree, {k: v for k, v in out.items() if v != 0})

    # ----- text ------------------------------------------------------------
    def to_text(self) -> str:
        """One "monomial : coefficient" line per monomial, in lexicographic order."""
        f = self.field
        return "\n".join(f"{_mono_name(e)} : {f.to_str(c)}" for e, c in zip(self.monomials, self.coeffs)) + "\n"

    @classmethod
    def from_text(cls, field: Field, nvars: int, degree: int, text: str) -> "Form":
        terms: dict = {}
        for line in text.strip().splitlines():
            if not line.strip():
                continue
            mono, _, coeff = line.rpartition(":")
            terms[_parse_mono(mono, nvars)] = field.parse(coeff)
        return cls.from_dict(field, nvars, degree, terms)

    def to_json(self) -> list:
        return [self.field.to_json(c) for c in self.coeffs]


def _raw_ok(field: Field, x) -> bool:
    return _is_raw(field, x)


def _sparse_mul(f: Field, a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            v = f.add(out.get(e, f.zero), f.mul(c1, c2))
            out[e] = v
    return {k: v for k, v in out.items() if v != 0}


def _random_point(field: Field, nvars: int, rng: random.Random) -> list:
    if field.is_rational:
        return [field(rng.randint(-6, 6)) for _ in range(nvars)]
    return [field.random(rng) for _ in range(nvars)]


def interpolate_form(
    field: Field,
    nvars: int,
    degree: int,
    evaluate: Callable[[list], object],
    rng: random.Random,
    *,
    extra: int = 8,
) -> Form:
    """Recover a form of known degree from its values at random points.

    Points are drawn until the evaluation matrix has full column rank; ``extra``
    further points over-determine the system and make the solve a consistency
    check rather than a fit.
    """
    mons = monomials(nvars, degree)
    n = len(mons)
    rows: list[list] = []
    vals: list = []
    attempts = 0
    while True:
        attempts += 1
        if attempts > 6:
            raise ArithmeticError("could not find an interpolation grid of full rank")
        for _ in range(n + extra - len(rows)):
            pt = _random_point(field, nvars, rng)
            rows.append([_mono_value(field, e, pt) for e in mons])
            vals.append(evaluate(pt))
        m = Matrix(field, rows)
        rhs = Matrix(field, [[v] for v in vals])
        x = solve(m, rhs)
        if x is None:
            raise ArithmeticError("values are not those of a form of the stated degree")
        if kernel(m).dim == 0:
            return Form(field, nvars, degree, [x[i, 0] for i in range(n)])
        extra += n


def vanishing_forms(field: Field, exps: Sequence[Exponent], points: Iterable[Sequence]) -> list[list]:
    """Basis of coefficient vectors (over the given monomials) vanishing at all points."""
    pts = [list(p) for p in points]
    if field.is_finite and field.degree == 1:
        p = field.p
        arr = np.ones((len(pts), len(exps)), dtype=np.int64)
        pa = np.array(pts, dtype=np.int64).reshape(len(pts), -1)
        for j, e in enumerate(exps):
            col = np.ones(len(pts), dtype=np.int64)
            for i, k in enumerate(e):
                for _ in range(k):
                    col = (col * pa[:, i]) % p
            arr[:, j] = col
        return [list(map(int, r)) for r in nullspace_mod(arr, p)]
    m = Matrix(field, [[_mono_value(field, e, pt) for e in exps] for pt in pts])
    return [list(r) for r in kernel(m).rows()]


# ---------------------------------------------------------------------------
# Univariate polynomials: coefficient lists, lowest degree first
# ---------------------------------------------------------------------------


def poly_trim(field: Field, a: Sequence) -> list:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_eval(field: Field, a: Sequence, x):
    acc = field.zero
    for c in reversed(a):
        acc = field.add(field.mul(acc, x), c)
    return acc


def poly_mul(field: Field, a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [field.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = field.add(out[i + j], field.mul(x, y))
    return poly_trim(field, out)


def poly_divmod(field: Field, a: Sequence, b: Sequence) -> tuple[list, list]:
    a = poly_trim(field, a)
    b = poly_trim(field, b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [field.zero] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    inv_lead = field.inv(b[-1])
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        c = field.mul(r[-1], inv_lead)
        q[k] = c
        for i, y in enumerate(b):
            r[i + k] = field.sub(r[i + k], field.mul(c, y))
        r = poly_trim(field, r)
    return poly_trim(field, q), r


def poly_roots(field: Field, a: Sequence) -> list:
    """All roots in a finite field by exhaustive scan, sorted by encoding."""
    a = poly_trim(field, a)
    if not a:
        raise ValueError("the zero polynomial vanishes everywhere")
    if len(a) == 1:
        return []
    ops = batch_ops(field)
    xs = np.arange(field.order, dtype=np.int64)
    acc = np.zeros(field.order, dtype=np.int64)
    for c in reversed(a):
        acc = ops.add(ops.mul(acc, xs), np.full(field.order, c, dtype=np.int64))
    return [int(x) for x in np.nonzero(acc == 0)[0]]


def poly_derivative(field: Field, a: Sequence) -> list:
    return poly_trim(field, [field.mul(field(k), c) for k, c in enumerate(a)][1:])


def poly_gcd(field: Field, a: Sequence, b: Sequence) -> list:
    """Monic greatest common divisor (empty list if both vanish)."""
    a, b = poly_trim(field, a), poly_trim(field, b)
    while b:
        a, b = b, poly_divmod(field, a, b)[1]
    if not a:
        return []
    inv = field.inv(a[-1])
    return [field.mul(inv, c) for c in a]
