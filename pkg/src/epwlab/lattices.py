"""Integral lattices, Beauville-Bogomolov arithmetic and surface invariants."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, gcd
from typing import Sequence

__all__ = [
    "IntLattice",
    "hyperbolic",
    "rank_one",
    "e8_negative",
    "direct_sum",
    "fujiki_degree",
    "rr_sections",
    "is_equivalent",
    "verify_certificate",
    "SurfaceInvariants",
    "surface_invariants",
    "bb_square",
    "divisibility",
    "integer_det",
]


def integer_det(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    a = [list(r) for r in m]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class IntLattice:
    gram: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self) -> None:
        g = self.gram
        n = len(g)
        if any(len(r) != n for r in g):
            raise ValueError("Gram matrix must be square")
        if any(not isinstance(x, int) for r in g for x in r):
            raise TypeError("Gram entries must be integers")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise ValueError("Gram matrix must be symmetric")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], name: str = "") -> "IntLattice":
        return cls(tuple(tuple(int(x) for x in r) for r in rows), name)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def det(self) -> int:
        return integer_det(self.gram)

    def product(self, u: Sequence[int], v: Sequence[int]) -> int:
        if len(u) != self.rank or len(v) != self.rank:
            raise ValueError("vector length does not match lattice rank")
        return sum(u[i] * self.gram[i][j] * v[j] for i in range(self.rank) for j in range(self.rank))

    def leading_minors(self) -> list[int]:
        return [integer_det([r[:k] for r in self.gram[:k]]) for k in range(1, self.rank + 1)]

    def is_negative_definite(self) -> bool:
        return all((-1) ** (k + 1) * m > 0 for k, m in enumerate(self.leading_minors()))

    def to_json(self) -> dict:
        return {"name": self.name, "gram": [list(r) for r in self.gram]}


def hyperbolic(scale: int = 1) -> IntLattice:
    """U(scale): Gram [[0, scale], [scale, 0]]."""
    return IntLattice(((0, scale), (scale, 0)), "U" if scale == 1 else f"U({scale})")


def rank_one(value: int) -> IntLattice:
    return IntLattice(((value,),), f"<{value}>")


_E8_EDGES = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)]


def e8_negative() -> IntLattice:
    """E8(-1): the negative of the E8 Cartan matrix."""
    g = [[0] * 8 for _ in range(8)]
    for i in range(8):
        g[i][i] = -2
    for i, j in _E8_EDGES:
        g[i][j] = g[j][i] = 1
    return IntLattice.from_rows(g, "E8(-1)")


def direct_sum(*lattices: IntLattice) -> IntLattice:
    n = sum(l.rank for l in lattices)
    g = [[0] * n for _ in range(n)]
    off = 0
    for lat in lattices:
        for i in range(lat.rank):
            for j in range(lat.rank):
                g[off + i][off + j] = lat.gram[i][j]
        off += lat.rank
    return IntLattice.from_rows(g, "+".join(l.name for l in lattices))


def fujiki_degree(q: int) -> int:
    """H^4 = 3 q(H)^2 for fourfolds of K3^[2] type."""
    if q <= 0 or q % 2:
        raise ValueError("q must be even and positive")
    return 3 * q * q


def rr_sections(q: int) -> int:
    """h^0(H) = binom(q/2 + 3, 2) for an ample class of square q on a K3^[2]-type fourfold."""
    if q < 0 or q % 2:
        raise ValueError("q must be even and non-negative")
    return comb(q // 2 + 3, 2)


def _matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def _transpose(a):
    return [list(r) for r in zip(*a)]


def verify_certificate(g1: IntLattice, g2: IntLattice, p: Sequence[Sequence[int]]) -> bool:
    """P^T G1 P = G2 and det P = +-1, by exact multiplication."""
    pm = [list(r) for r in p]
    if abs(integer_det(pm)) != 1:
        return False
    return _matmul(_matmul(_transpose(pm), [list(r) for r in g1.gram]), pm) == [list(r) for r in g2.gram]


def is_equivalent(g1: IntLattice, g2: IntLattice, bound: int = 3) -> list[list[int]] | None:
    """Search for an integral P with entries bounded by `bound`, det P = +-1 and P^T G1 P = G2.

    Columns of P are vectors of G1 whose squares and mutual products match G2, so
    the search enumerates bounded vectors by norm and extends column by column.
    None means the bounded search failed, which does not prove inequivalence.
    """
    n = g1.rank
    if n != g2.rank:
        return None
    if n > 3:
        raise ValueError("bounded equivalence search supports rank <= 3")
    if not 0 < bound <= 6:
        raise ValueError("bound must lie in 1..6")
    if g1.det() != g2.det():
        return None
    vectors = list(itertools.product(range(-bound, bound + 1), repeat=n))
    by_norm: dict[int, list] = {}
    for v in vectors:
        by_norm.setdefault(g1.product(v, v), []).append(v)
    cols: list = []

    def extend(j: int):
        if j == n:
            p = _transpose(cols)
            return p if verify_certificate(g1, g2, p) else None
        for v in by_norm.get(g2.gram[j][j], []):
            if all(g1.product(cols[i], v) == g2.gram[i][j] for i in range(j)):
                cols.append(v)
                found = extend(j + 1)
                if found is not None:
                    return found
                cols.pop()
        return None

    return extend(0)


@dataclass(frozen=True)
class SurfaceInvariants:
    kind: str
    K2: int
    c2: int
    pg: int
    q: int

    @property
    def chi(self) -> int:
        return self.pg - self.q + 1

    def noether_holds(self) -> bool:
        return 12 * self.chi == self.K2 + self.c2

    def to_json(self) -> dict:
        return {"kind": self.kind, "K2": self.K2, "c2": self.c2, "pg": self.pg, "q": self.q, "chi": self.chi}


_SURFACES = {
    "F0": SurfaceInvariants("F0", 288, 156, 36, 0),
    "F": SurfaceInvariants("F", 576, 312, 82, 9),
}


def surface_invariants(kind: str) -> SurfaceInvariants:
    """Invariants of the surface of (1,1)-conics (F) and its étale quotient (F0)."""
    if kind not in _SURFACES:
        raise ValueError(f"unknown surface kind {kind!r}; expected F or F0")
    rec = _SURFACES[kind]
    if not rec.noether_holds():
        raise AssertionError(f"Noether formula fails for {kind}")
    if kind == "F":
        base = _SURFACES["F0"]
        if (rec.K2, rec.c2, rec.chi) != (2 * base.K2, 2 * base.c2, 2 * base.chi):
            raise AssertionError("F is not an étale double cover of F0 numerically")
    return rec


def bb_square(lat: IntLattice, v: Sequence[int]) -> int:
    return lat.product(v, v)


def divisibility(lat: IntLattice, v: Sequence[int]) -> int:
    """Positive generator of the ideal (v, L)."""
    if len(v) != lat.rank:
        raise ValueError("vector length does not match lattice rank")
    g = 0
    for j in range(lat.rank):
        g = gcd(g, sum(v[i] * lat.gram[i][j] for i in range(lat.rank)))
    return g
