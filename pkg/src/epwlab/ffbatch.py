"""Vectorised finite-field kernels for large scans.

Values use the same integer encoding as :class:`epwlab.exactlin.Field`, so raw
matrices convert to numpy arrays without translation.  Prime fields use plain
modular arithmetic; the quadratic extension splits a + p*b into its two
coordinates and multiplies with t^2 = r, r the least non-residue.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .exactlin import Field

__all__ = ["BatchOps", "batch_ops", "batch_rank", "rref_mod", "nullspace_mod", "projective_points"]


# extension fields up to this order use flat q*q lookup tables
TABLE_LIMIT = 2048


class BatchOps:
    """Elementwise arithmetic on int64 arrays of encoded field values."""

    def __init__(self, field: Field):
        if not field.is_finite:
            raise ValueError("batch kernels need a finite field")
        self.field = field
        self.p = field.p
        self.q = field.order
        self.ext = field.degree == 2
        p = self.p
        if not self.ext:
            self.inv_table = np.array([0] + [pow(x, -1, p) for x in range(1, p)], dtype=np.int64)
        else:
            self.r = field.nonresidue
            a, b = self._split(np.arange(self.q, dtype=np.int64))
            norm = (a * a - self.r * ((b * b) % p)) % p
            inv_norm = np.array([0] + [pow(int(x), -1, p) for x in range(1, p)], dtype=np.int64)[norm]
            self.inv_table = self._join((a * inv_norm) % p, (-b * inv_norm) % p)
            self._mul_table = self._add_table = None
            if self.q <= TABLE_LIMIT:
                xs = np.arange(self.q, dtype=np.int64)
                self._mul_table = self._mul_arith(xs[:, None], xs[None, :]).ravel()
                self._add_table = self._add_arith(xs[:, None], xs[None, :]).ravel()

    def _split(self, x):
        return x % self.p, x // self.p

    def _join(self, a, b):
        return a + self.p * b

    def mul(self, x, y):
        if not self.ext:
            return (x * y) % self.p
        if self._mul_table is not None:
            return self._mul_table[np.asarray(x) * self.q + y]
        return self._mul_arith(x, y)

    def add(self, x, y):
        if not self.ext:
            return (x + y) % self.p
        if self._add_table is not None:
            return self._add_table[np.asarray(x) * self.q + y]
        return self._add_arith(x, y)

    def _mul_arith(self, x, y):
        p = self.p
        a1, b1 = self._split(x)
        a2, b2 = self._split(y)
        re = (a1 * a2 + self.r * ((b1 * b2) % p)) % p
        im = (a1 * b2 + a2 * b1) % p
        return self._join(re, im)

    def _add_arith(self, x, y):
        p = self.p
        a1, b1 = self._split(x)
        a2, b2 = self._split(y)
        return self._join((a1 + a2) % p, (b1 + b2) % p)

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def neg(self, x):
        p = self.p
        if not self.ext:
            return (-x) % p
        a, b = self._split(x)
        return self._join((-a) % p, (-b) % p)

    def inv(self, x):
        return self.inv_table[x]


@lru_cache(maxsize=16)
def batch_ops(field: Field) -> BatchOps:
    return BatchOps(field)


def batch_rank(mats: np.ndarray, field: Field) -> np.ndarray:
    """Ranks of a stack of matrices with shape (N, rows, cols)."""
    ops = batch_ops(field)
    m = np.array(mats, dtype=np.int64, copy=True)
    if m.ndim != 3:
        raise ValueError("expected a 3-dimensional stack")
    n, r, c = m.shape
    rank = np.zeros(n, dtype=np.int64)
    rows_idx = np.arange(r)
    for col in range(c):
        mask = (m[:, :, col] != 0) & (rows_idx[None, :] >= rank[:, None])
        has = mask.any(axis=1)
        if not has.any():
            continue
        sel = np.nonzero(has)[0]
        piv = np.argmax(mask[sel], axis=1)
        rk = rank[sel]
        prow = m[sel, piv, :]
        krow = m[sel, rk, :]
        m[sel, piv, :] = krow
        m[sel, rk, :] = prow
        ipv = ops.inv(prow[:, col])
        norm = ops.mul(prow, ipv[:, None])
        sub = m[sel]
        fac = np.where(rows_idx[None, :] > rk[:, None], sub[:, :, col], 0)
        sub = ops.sub(sub, ops.mul(fac[:, :, None], norm[:, None, :]))
        m[sel] = sub
        rank[sel] += 1
    return rank


def rref_mod(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of a 2-d array over F_p (zero rows dropped)."""
    m = np.array(a, dtype=np.int64, copy=True) % p
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * pow(int(m[r, c]), -1, p)) % p
        col = m[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            m[nzr] = (m[nzr] - col[nzr, None] * m[r][None, :]) % p
        pivots.append(c)
        r += 1
    return m[:r], pivots


def nullspace_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Basis (rows) of the right kernel of a over F_p."""
    red, piv = rref_mod(a, p)
    cols = a.shape[1]
    pivset = set(piv)
    free = [c for c in range(cols) if c not in pivset]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for k, fc in enumerate(free):
        out[k, fc] = 1
        for r, pc in enumerate(piv):
            out[k, pc] = (-red[r, fc]) % p
    return out


def projective_points(field: Field, n: int) -> np.ndarray:
    """All points of P^{n-1} over a finite field, first nonzero coordinate 1, sorted."""
    q = field.order
    blocks = []
    for lead in range(n):
        rest = n - lead - 1
        grid = np.indices((q,) * rest).reshape(rest, -1).T if rest else np.zeros((1, 0), dtype=np.int64)
        block = np.zeros((grid.shape[0], n), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1 :] = grid
        blocks.append(block)
    pts = np.concatenate(blocks, axis=0)
    order = np.lexsort(pts.T[::-1])
    return pts[order]
