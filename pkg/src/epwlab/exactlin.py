"""Exact field arithmetic and dense linear algebra.

Three field families are supported: the rationals, prime fields and their
quadratic extensions.  Matrices keep raw field values (``Fraction`` for the
rationals, ``int`` residues otherwise) so that the elimination loops stay
cheap; :class:`FieldElem` wraps a single value for user-facing arithmetic.

Elements of the quadratic extension of F_p are encoded as ``a + b*p`` for
``a + b*t`` with ``t^2 = n`` and ``n`` the least quadratic non-residue.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

__all__ = [
    "Field",
    "QQ",
    "GF",
    "GF2",
    "FieldElem",
    "Matrix",
    "Subspace",
    "rank",
    "rref",
    "intersect",
    "kernel",
    "solve",
    "det",
    "adjugate",
    "sqrt_in_field",
    "parse_matrix",
    "format_matrix",
    "seeded_rng",
    "is_prime",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def seeded_rng(seed: int, *labels: object) -> random.Random:
    """Deterministic generator derived from a 64-bit seed and a label path."""
    key = ":".join([str(int(seed) & 0xFFFFFFFFFFFFFFFF)] + [str(x) for x in labels])
    return random.Random(key)


@dataclass(frozen=True)
class Field:
    """Field descriptor; all arithmetic acts on raw values.

    Attributes:
        p: characteristic, 0 for the rationals.
        degree: 1 for Q and F_p, 2 for F_{p^2}.
    """

    p: int
    degree: int = 1

    def __post_init__(self) -> None:
        if self.p == 0:
            if self.degree != 1:
                raise ValueError("the rationals have no quadratic extension here")
            return
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.degree not in (1, 2):
            raise ValueError("only prime fields and quadratic extensions are supported")
        if self.degree == 2 and self.p == 2:
            raise ValueError("quadratic extension requires an odd prime")

    # ----- descriptors -------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.p == 0

    @property
    def is_finite(self) -> bool:
        return self.p != 0

    @property
    def order(self) -> int | None:
        return None if self.p == 0 else self.p**self.degree

    @property
    def nonresidue(self) -> int:
        """Least quadratic non-residue mod p, the extension modulus constant."""
        return _least_nonresidue(self.p)

    @property
    def base(self) -> "Field":
        return Field(self.p, 1)

    def extension(self) -> "Field":
        if self.degree != 1 or self.p == 0:
            raise ValueError("extension only defined for prime fields")
        return Field(self.p, 2)

    def __repr__(self) -> str:
        if self.p == 0:
            return "QQ"
        return f"GF({self.p})" if self.degree == 1 else f"GF({self.p}^2)"

    # ----- constants and conversion ------------------------------------
    @property
    def zero(self):
        return Fraction(0) if self.p == 0 else 0

    @property
    def one(self):
        return Fraction(1) if self.p == 0 else 1

    def __call__(self, x) -> object:
        """Convert an int, Fraction, string or FieldElem to a raw value."""
        if isinstance(x, FieldElem):
            if x.field == self:
                return x.value
            if x.field.p == self.p and x.field.degree == 1 and self.degree == 2:
                return x.value
            raise ValueError(f"cannot coerce {x.field!r} element into {self!r}")
        if isinstance(x, str):
            return self.parse(x)
        if isinstance(x, Fraction):
            if self.p == 0:
                return x
            return self.div(self(x.numerator), self(x.denominator))
        if isinstance(x, int):
            if self.p == 0:
                return Fraction(x)
            return x % self.p
        raise TypeError(f"cannot convert {type(x).__name__} to a field value")

    def elem(self, x) -> "FieldElem":
        return FieldElem(self, self(x))

    def pair(self, a: int, b: int) -> int:
        """Raw extension value a + b*t."""
        if self.degree != 2:
            raise ValueError("pair() needs the quadratic extension")
        return a % self.p + self.p * (b % self.p)

    def components(self, x) -> tuple[int, int]:
        if self.degree != 2:
            return (x, 0)
        return (x % self.p, x // self.p)

    # ----- arithmetic --------------------------------------------------
    def add(self, a, b):
        if self.p == 0:
            return a + b
        if self.degree == 1:
            return (a + b) % self.p
        p = self.p
        return (a % p + b % p) % p + p * ((a // p + b // p) % p)

    def sub(self, a, b):
        if self.p == 0:
            return a - b
        if self.degree == 1:
            return (a - b) % self.p
        p = self.p
        return (a % p - b % p) % p + p * ((a // p - b // p) % p)

    def neg(self, a):
        if self.p == 0:
            return -a
        if self.degree == 1:
            return (-a) % self.p
        p = self.p
        return (-(a % p)) % p + p * ((-(a // p)) % p)

    def mul(self, a, b):
        if self.p == 0:
            return a * b
        p = self.p
        if self.degree == 1:
            return (a * b) % p
        a0, a1 = a % p, a // p
        b0, b1 = b % p, b // p
        n = _least_nonresidue(p)
        return (a0 * b0 + n * a1 * b1) % p + p * ((a0 * b1 + a1 * b0) % p)

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero")
        if self.p == 0:
            return 1 / a
        p = self.p
        if self.degree == 1:
            return pow(a, -1, p)
        a0, a1 = a % p, a // p
        n = _least_nonresidue(p)
        norm = (a0 * a0 - n * a1 * a1) % p
        ninv = pow(norm, -1, p)
        return (a0 * ninv) % p + p * ((-a1 * ninv) % p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, k: int):
        if k < 0:
            return self.pow(self.inv(a), -k)
        result = self.one
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    @staticmethod
    def is_zero(a) -> bool:
        return a == 0

    def in_base(self, a) -> bool:
        """True if a lies in the prime field (always true for degree 1)."""
        return self.degree == 1 or a < self.p

    # ----- enumeration and sampling ------------------------------------
    def elements(self) -> Iterator:
        if self.p == 0:
            raise ValueError("the rationals cannot be enumerated")
        return iter(range(self.order))

    def random(self, rng: random.Random, *, small: int = 5):
        """Uniform element (finite) or a small rational with |num|, den <= small."""
        if self.p == 0:
            return Fraction(rng.randint(-small, small), rng.randint(1, small))
        return rng.randrange(self.order)

    def random_nonzero(self, rng: random.Random, *, small: int = 5):
        while True:
            x = self.random(rng, small=small)
            if x != 0:
                return x

    # ----- text --------------------------------------------------------
    def to_str(self, a) -> str:
        if self.p == 0:
            return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
        if self.degree == 1:
            return str(a)
        a0, a1 = self.components(a)
        return str(a0) if a1 == 0 else f"{a0}+{a1}t"

    def to_json(self, a):
        """JSON-friendly value: int, "a/b" string, or [a, b] pair."""
        if self.p == 0:
            return int(a) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
        if self.degree == 1:
            return int(a)
        return list(self.components(a))

    def parse(self, s: str):
        s = s.strip()
        if self.degree == 2 and s.endswith("t"):
            head, _, tail = s[:-1].rpartition("+")
            return self.pair(int(head) if head else 0, int(tail) if tail else 1)
        if "/" in s:
            num, den = s.split("/")
            return self(Fraction(int(num), int(den)))
        return self(int(s))

    # ----- square roots ------------------------------------------------
    def is_square(self, a) -> bool:
        if self.p == 0:
            raise ValueError("square test over the rationals is unsupported")
        if a == 0 or self.p == 2:
            return True
        return self.pow(a, (self.order - 1) // 2) == 1

    def sqrt(self, a):
        """Square root with the smaller encoded residue, or None."""
        if self.p == 0:
            raise ValueError("sqrt_in_field needs a finite field")
        if a == 0:
            return 0
        if self.p == 2:
            return a
        if not self.is_square(a):
            return None
        r = self._tonelli_shanks(a)
        return min(r, self.neg(r))

    def _tonelli_shanks(self, a):
        q = self.order - 1
        s = 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = next(x for x in range(2, self.order) if not self.is_square(x))
        m, c = s, self.pow(z, q)
        t, r = self.pow(a, q), self.pow(a, (q + 1) // 2)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = self.mul(t2, t2)
                i += 1
            b = self.pow(c, 1 << (m - i - 1))
            m, c = i, self.mul(b, b)
            t, r = self.mul(t, c), self.mul(r, b)
        return r


_NONRESIDUE_CACHE: dict[int, int] = {}


def _least_nonresidue(p: int) -> int:
    n = _NONRESIDUE_CACHE.get(p)
    if n is None:
        n = next(x for x in range(2, p) if pow(x, (p - 1) // 2, p) == p - 1)
        _NONRESIDUE_CACHE[p] = n
    return n


QQ = Field(0)


def GF(p: int) -> Field:
    return Field(p, 1)


def GF2(p: int) -> Field:
    """Quadratic extension F_{p^2}."""
    return Field(p, 2)


@dataclass(frozen=True)
class FieldElem:
    """A single field element with operator overloads."""

    field: Field
    value: object

    def _other(self, o) -> object:
        return self.field(o)

    def __add__(self, o):
        return FieldElem(self.field, self.field.add(self.value, self._other(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return FieldElem(self.field, self.field.sub(self.value, self._other(o)))

    def __rsub__(self, o):
        return FieldElem(self.field, self.field.sub(self._other(o), self.value))

    def __mul__(self, o):
        return FieldElem(self.field, self.field.mul(self.value, self._other(o)))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return FieldElem(self.field, self.field.div(self.value, self._other(o)))

    def __rtruediv__(self, o):
        return FieldElem(self.field, self.field.div(self._other(o), self.value))

    def __neg__(self):
        return FieldElem(self.field, self.field.neg(self.value))

    def __pow__(self, k: int):
        return FieldElem(self.field, self.field.pow(self.value, k))

    def __eq__(self, o) -> bool:
        if isinstance(o, FieldElem):
            return self.field == o.field and self.value == o.value
        try:
            return self.value == self.field(o)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field, self.value))

    def is_zero(self) -> bool:
        return self.value == 0

    def inverse(self) -> "FieldElem":
        return FieldElem(self.field, self.field.inv(self.value))

    def __str__(self) -> str:
        return self.field.to_str(self.value)

    def __repr__(self) -> str:
        return f"FieldElem({self.field!r}, {self.field.to_str(self.value)})"


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


class Matrix:
    """Immutable dense matrix of raw field values."""

    __slots__ = ("field", "rows", "cols", "_data")

    def __init__(self, field: Field, data: Sequence[Sequence], cols: int | None = None):
        rows = [tuple(field(x) if not _is_raw(field, x) else x for x in row) for row in data]
        if cols is None:
            if not rows:
                raise ValueError("cannot infer column count of an empty matrix")
            cols = len(rows[0])
        for row in rows:
            if len(row) != cols:
                raise ValueError("ragged matrix rows")
        self.field = field
        self.rows = len(rows)
        self.cols = cols
        self._data = tuple(rows)

    @classmethod
    def _raw(cls, field: Field, rows: Sequence[Sequence], cols: int) -> "Matrix":
        m = object.__new__(cls)
        m.field = field
        m.rows = len(rows)
        m.cols = cols
        m._data = tuple(tuple(r) for r in rows)
        return m

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "Matrix":
        z = field.zero
        return cls._raw(field, [[z] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        z, o = field.zero, field.one
        return cls._raw(field, [[o if i == j else z for j in range(n)] for i in range(n)], n)

    @classmethod
    def random(cls, field: Field, rows: int, cols: int, rng: random.Random, *, small: int = 5) -> "Matrix":
        return cls._raw(
            field, [[field.random(rng, small=small) for _ in range(cols)] for _ in range(rows)], cols
        )

    @classmethod
    def random_symmetric(cls, field: Field, n: int, rng: random.Random, *, small: int = 5) -> "Matrix":
        data = [[field.zero] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                data[i][j] = data[j][i] = field.random(rng, small=small)
        return cls._raw(field, data, n)

    # ----- access ------------------------------------------------------
    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def entry(self, i: int, j: int) -> FieldElem:
        return FieldElem(self.field, self._data[i][j])

    def row(self, i: int) -> tuple:
        return self._data[i]

    def tolist(self) -> list[list]:
        return [list(r) for r in self._data]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.shape == other.shape
            and self._data == other._data
        )

    def __hash__(self) -> int:
        return hash((self.field, self.cols, self._data))

    def __repr__(self) -> str:
        return f"Matrix({self.field!r}, {self.rows}x{self.cols})"

    # ----- algebra -----------------------------------------------------
    def transpose(self) -> "Matrix":
        return Matrix._raw(self.field, list(zip(*self._data)) if self.rows else [], self.rows)

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        add = self.field.add
        return Matrix._raw(
            self.field,
            [[add(a, b) for a, b in zip(r, s)] for r, s in zip(self._data, other._data)],
            self.cols,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        sub = self.field.sub
        return Matrix._raw(
            self.field,
            [[sub(a, b) for a, b in zip(r, s)] for r, s in zip(self._data, other._data)],
            self.cols,
        )

    def __neg__(self) -> "Matrix":
        neg = self.field.neg
        return Matrix._raw(self.field, [[neg(a) for a in r] for r in self._data], self.cols)

    def scale(self, c) -> "Matrix":
        c = self.field(c) if not _is_raw(self.field, c) else c
        mul = self.field.mul
        return Matrix._raw(self.field, [[mul(c, a) for a in r] for r in self._data], self.cols)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.field != other.field:
            raise ValueError("field mismatch")
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        f = self.field
        cols = list(zip(*other._data)) if other.rows else [()] * other.cols
        if f.p and f.degree == 1:
            p = f.p
            out = [[sum(a * b for a, b in zip(r, c)) % p for c in cols] for r in self._data]
        elif f.p == 0:
            out = [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self._data]
        else:
            out = []
            for r in self._data:
                row = []
                for c in cols:
                    acc = 0
                    for a, b in zip(r, c):
                        if a and b:
                            acc = f.add(acc, f.mul(a, b))
                    row.append(acc)
                out.append(row)
        return Matrix._raw(f, out, other.cols)

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.field != other.field or self.cols != other.cols:
            raise ValueError("vstack needs equal fields and column counts")
        return Matrix._raw(self.field, self._data + other._data, self.cols)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.field != other.field or self.rows != other.rows:
            raise ValueError("hstack needs equal fields and row counts")
        return Matrix._raw(
            self.field, [a + b for a, b in zip(self._data, other._data)], self.cols + other.cols
        )

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "Matrix":
        cols = list(cols)
        return Matrix._raw(self.field, [[self._data[i][j] for j in cols] for i in rows], len(cols))

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self._data[i][j] == self._data[j][i] for i in range(self.rows) for j in range(i)
        )

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._data for x in r)

    def _check_same(self, other: "Matrix") -> None:
        if self.field != other.field or self.shape != other.shape:
            raise ValueError("matrix field or shape mismatch")


def _is_raw(field: Field, x) -> bool:
    if field.p == 0:
        return isinstance(x, Fraction)
    return isinstance(x, int) and not isinstance(x, bool) and 0 <= x < field.order


# ---------------------------------------------------------------------------
# Elimination kernels
# ---------------------------------------------------------------------------


def _rref_rows(field: Field, rows: list[list], cols: int) -> tuple[list[list], list[int]]:
    """In-place reduced row echelon form; returns (nonzero rows, pivots)."""
    if field.p and field.degree == 1:
        return _rref_rows_prime(field.p, rows, cols)
    add, mul, neg, inv = field.add, field.mul, field.neg, field.inv
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(cols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        iv = inv(pr[c])
        pr = [mul(iv, x) if x != 0 else x for x in pr]
        rows[r] = pr
        for i in range(nrows):
            if i != r:
                fac = rows[i][c]
                if fac != 0:
                    nf = neg(fac)
                    rows[i] = [add(x, mul(nf, y)) if y != 0 else x for x, y in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def _rref_rows_prime(p: int, rows: list[list], cols: int) -> tuple[list[list], list[int]]:
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(cols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        iv = pow(rows[r][c], -1, p)
        pr = [(iv * x) % p for x in rows[r]]
        rows[r] = pr
        for i in range(nrows):
            if i != r:
                fac = rows[i][c] % p
                if fac:
                    rows[i] = [(x - fac * y) % p for x, y in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form with zero rows dropped, and pivot columns."""
    rows, piv = _rref_rows(m.field, [list(r) for r in m._data], m.cols)
    return Matrix._raw(m.field, rows, m.cols), piv


def rank(m: Matrix) -> int:
    """Row rank by exact Gaussian elimination."""
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(_rref_rows(m.field, [list(r) for r in m._data], m.cols)[1])


def kernel(m: Matrix) -> "Subspace":
    """Right kernel {x : m x = 0} as a Subspace of the column space."""
    red, piv = rref(m)
    f = m.field
    free = [c for c in range(m.cols) if c not in set(piv)]
    basis = []
    for fc in free:
        v = [f.zero] * m.cols
        v[fc] = f.one
        for r, pc in enumerate(piv):
            v[pc] = f.neg(red[r, fc])
        basis.append(v)
    return Subspace.from_rows(f, m.cols, basis)


def solve(m: Matrix, rhs: Matrix) -> Matrix | None:
    """A particular solution X of m X = rhs, or None if inconsistent."""
    if m.field != rhs.field or m.rows != rhs.rows:
        raise ValueError("solve: shape or field mismatch")
    f = m.field
    aug = m.hstack(rhs)
    red, piv = rref(aug)
    if any(c >= m.cols for c in piv):
        return None
    out = [[f.zero] * rhs.cols for _ in range(m.cols)]
    for r, pc in enumerate(piv):
        for j in range(rhs.cols):
            out[pc][j] = red[r, m.cols + j]
    return Matrix._raw(f, out, rhs.cols)


def det(m: Matrix) -> FieldElem:
    """Determinant by elimination."""
    return FieldElem(m.field, _det_raw(m))


def _det_raw(m: Matrix):
    if m.rows != m.cols:
        raise ValueError("det requires a square matrix")
    f = m.field
    n = m.rows
    if n == 0:
        return f.one
    a = [list(r) for r in m._data]
    result = f.one
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return f.zero
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            result = f.neg(result)
        pv = a[c][c]
        result = f.mul(result, pv)
        iv = f.inv(pv)
        for i in range(c + 1, n):
            fac = a[i][c]
            if fac != 0:
                k = f.neg(f.mul(fac, iv))
                a[i] = [f.add(x, f.mul(k, y)) for x, y in zip(a[i], a[c])]
    return result


def adjugate(m: Matrix) -> Matrix:
    """Classical adjoint, satisfying m @ adj(m) = det(m) * I."""
    if m.rows != m.cols:
        raise ValueError("adjugate requires a square matrix")
    f = m.field
    n = m.rows
    if n == 1:
        return Matrix._raw(f, [[f.one]], 1)
    d = _det_raw(m)
    if d != 0:
        inv = solve(m, Matrix.identity(f, n))
        return inv.scale(d)
    out = [[f.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = m.submatrix([r for r in range(n) if r != j], [c for c in range(n) if c != i])
            c = _det_raw(minor)
            out[i][j] = c if (i + j) % 2 == 0 else f.neg(c)
    return Matrix._raw(f, out, n)


def sqrt_in_field(a: FieldElem) -> FieldElem | None:
    """Square root with the smaller residue, or None if a is not a square."""
    r = a.field.sqrt(a.value)
    return None if r is None else FieldElem(a.field, r)


# ---------------------------------------------------------------------------
# Subspaces
# ---------------------------------------------------------------------------


class Subspace:
    """A linear subspace stored by its canonical reduced row echelon basis."""

    __slots__ = ("field", "ambient", "basis", "pivots")

    def __init__(self, field: Field, ambient: int, basis: Matrix, pivots: list[int]):
        self.field = field
        self.ambient = ambient
        self.basis = basis
        self.pivots = tuple(pivots)

    @classmethod
    def from_rows(cls, field: Field, ambient: int, rows: Iterable[Sequence]) -> "Subspace":
        data = [[x if _is_raw(field, x) else field(x) for x in r] for r in rows]
        for r in data:
            if len(r) != ambient:
                raise ValueError("row length differs from ambient dimension")
        red, piv = _rref_rows(field, data, ambient)
        return cls(field, ambient, Matrix._raw(field, red, ambient), piv)

    @classmethod
    def from_matrix(cls, m: Matrix) -> "Subspace":
        return cls.from_rows(m.field, m.cols, m.tolist())

    @classmethod
    def zero(cls, field: Field, ambient: int) -> "Subspace":
        return cls(field, ambient, Matrix._raw(field, [], ambient), [])

    @classmethod
    def coordinate(cls, field: Field, ambient: int, indices: Iterable[int]) -> "Subspace":
        rows = []
        for i in sorted(set(indices)):
            r = [field.zero] * ambient
            r[i] = field.one
            rows.append(r)
        return cls.from_rows(field, ambient, rows)

    @property
    def dim(self) -> int:
        return self.basis.rows

    def rows(self) -> list[tuple]:
        return [self.basis.row(i) for i in range(self.dim)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.field == other.field
            and self.ambient == other.ambient
            and self.basis == other.basis
        )

    def __hash__(self) -> int:
        return hash((self.field, self.ambient, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient}, field={self.field!r})"

    def contains(self, vec: Sequence) -> bool:
        return Subspace.from_rows(self.field, self.ambient, self.rows() + [list(vec)]).dim == self.dim

    def contains_space(self, other: "Subspace") -> bool:
        return self.sum(other).dim == self.dim

    def sum(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.from_rows(self.field, self.ambient, self.rows() + other.rows())

    def annihilator(self) -> "Subspace":
        if self.dim == 0:
            return Subspace.from_rows(
                self.field, self.ambient, Matrix.identity(self.field, self.ambient).tolist()
            )
        return kernel(self.basis)

    def _check(self, other: "Subspace") -> None:
        if self.field != other.field or self.ambient != other.ambient:
            raise ValueError("ambient dimension or field mismatch")


def intersect(s1: Subspace, s2: Subspace) -> Subspace:
    """Canonical basis of s1 ∩ s2."""
    s1._check(s2)
    if s1.dim == 0 or s2.dim == 0:
        return Subspace.zero(s1.field, s1.ambient)
    ann = s1.annihilator().rows() + s2.annihilator().rows()
    if not ann:
        return s1
    return kernel(Matrix._raw(s1.field, ann, s1.ambient))


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------


def _field_from_modulus(mod: int) -> Field:
    if mod == 0:
        return QQ
    if is_prime(mod):
        return GF(mod)
    r = int(round(mod**0.5))
    for cand in (r - 1, r, r + 1):
        if cand > 1 and cand * cand == mod and is_prime(cand):
            return GF2(cand)
    raise ValueError(f"modulus {mod} is neither 0, a prime, nor a prime square")


def parse_matrix(text: str) -> Matrix:
    """Parse the "rows cols modulus" header followed by whitespace-separated entries."""
    tokens = text.split()
    if len(tokens) < 3:
        raise ValueError("missing matrix header")
    rows, cols, mod = int(tokens[0]), int(tokens[1]), int(tokens[2])
    if rows <= 0 or cols <= 0:
        raise ValueError("matrix dimensions must be positive")
    field = _field_from_modulus(mod)
    entries = tokens[3:]
    if len(entries) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, found {len(entries)}")
    vals = [field.parse(t) for t in entries]
    return Matrix._raw(field, [vals[i * cols : (i + 1) * cols] for i in range(rows)], cols)


def format_matrix(m: Matrix) -> str:
    f = m.field
    mod = 0 if f.p == 0 else f.order
    lines = [f"{m.rows} {m.cols} {mod}"]
    lines += [" ".join(f.to_str(x) for x in m.row(i)) for i in range(m.rows)]
    return "\n".join(lines) + "\n"
