"""EPW quartic sections of the cone over P(∧²U1) x P(U2).

Cone points are written [t : x ⊗ y] with x ∈ ∧²U1 (coordinates e12, e13, e23),
y ∈ U2 (coordinates e4, e5, e6) and t the coefficient of e1∧e2∧e3.  In scans x and
y are normalized (first nonzero coordinate 1) and t runs over the field, which
lists every cone point other than the vertex exactly once.

The global quartic is kept in graded form: sum_k t^(4-k) g_k(x, y) with g_k of
bidegree (k, k), 1 + 9 + 36 + 100 + 225 = 371 coefficients.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .exactlin import GF, Field, Matrix, Subspace, intersect, rank, seeded_rng, solve
from .exterior import (
    cone_point,
    cone_spanning_coefficients,
    epw_frame,
    eta_form,
    kummer_frame,
    wedge3_matrix,
    wedge_vectors,
    _epw_lift,
    _kummer_embedding,
    _plane_for,
)
from .parallel import parallel_map
from .ffbatch import batch_rank, nullspace_mod, projective_points
from .kummer import kummer_from_lagrangian, node_scan
from .lagrangian import LagrangianSubspace, epw_vertex_lagrangian, lagrangian_from_quadric
from .polys import Form, monomials

__all__ = [
    "RankProfile",
    "EPWQuarticSection",
    "random_admissible_lagrangian",
    "cone_pairing_tensors",
    "cone_dims",
    "scan_cone",
    "vertex_rank",
    "ruling_roots",
    "collect_d1_points",
    "collect_rank2_points",
    "interpolate_quartic",
    "validate_quartic",
    "tangent_cone_check",
    "fiber_lagrangian_K4",
    "fiber_lagrangian_M2",
    "fiber_check_K4",
    "fiber_check_M2",
    "epw_report",
    "GRADED_BLOCKS",
]

GRADED_BLOCKS = tuple((k, ex, ey) for k in range(5) for ex in monomials(3, k) for ey in monomials(3, k))
BLOCK_SIZES = (1, 9, 36, 100, 225)


def random_admissible_lagrangian(field: Field, rng: random.Random) -> tuple[Matrix, LagrangianSubspace]:
    """A random full-rank Q' and the graph Lagrangian it defines."""
    while True:
        q = Matrix.random_symmetric(field, 9, rng)
        if rank(q) == 9:
            return q, lagrangian_from_quadric(q)


# ---------------------------------------------------------------------------
# Rank scans
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def _x_tensors(field: Field, x: tuple, arows: tuple) -> tuple:
    base, ycoef, tcoef = cone_spanning_coefficients(field, list(x))
    frame = epw_frame(field)
    g = np.array(frame.gram.tolist(), dtype=np.int64)
    a = np.array(arows, dtype=np.int64)
    pm = (g @ a.T) % field.p  # 18 x 9
    return (base @ pm) % field.p, np.stack([(y @ pm) % field.p for y in ycoef]), (tcoef @ pm) % field.p


def cone_pairing_tensors(abar: LagrangianSubspace, x: Sequence) -> tuple:
    """(B, Y, T) with pairing(span T_U, A) = B + sum y_j Y_j + t T for cone points over x."""
    f = abar.field
    if not f.is_finite or f.degree != 1:
        raise ValueError("cone scans run over prime fields")
    return _x_tensors(f, tuple(int(c) for c in x), tuple(tuple(int(c) for c in r) for r in abar.rows()))


def cone_dims(abar: LagrangianSubspace, points: np.ndarray) -> np.ndarray:
    """dim(A ∩ T_U) for an (N, 7) array of cone points (t, x, y), grouped by x."""
    f = abar.field
    p = f.p
    pts = np.asarray(points, dtype=np.int64)
    out = np.zeros(len(pts), dtype=np.int64)
    if not len(pts):
        return out
    xs, inverse = np.unique(pts[:, 1:4], axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)

    def group(k: int) -> tuple:
        sel = np.nonzero(inverse == k)[0]
        b, ycoef, tcoef = cone_pairing_tensors(abar, xs[k])
        sub = pts[sel]
        mats = b[None] + tcoef[None] * sub[:, 0, None, None]
        for j in range(3):
            mats = mats + ycoef[j][None] * sub[:, 4 + j, None, None]
        return sel, 9 - batch_rank(mats % p, f)

    for sel, dims in parallel_map(group, range(len(xs))):
        out[sel] = dims
    return out


def vertex_rank(abar: LagrangianSubspace) -> int:
    return intersect(abar.space, epw_vertex_lagrangian(abar.field).space).dim


@dataclass
class RankProfile:
    """Classification of the F_p-points of the cone by dim(A ∩ T_U)."""

    p: int
    counts: dict
    vertex_dim: int
    points: np.ndarray = dc_field(repr=False)
    dims: np.ndarray = dc_field(repr=False)

    def samples(self, k: int) -> np.ndarray:
        return self.points[self.dims == k]

    @property
    def r1(self) -> int:
        return self.counts.get(1, 0)

    @property
    def r2(self) -> int:
        return self.counts.get(2, 0)

    @property
    def r3(self) -> int:
        return sum(c for k, c in self.counts.items() if k >= 3)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "rank_counts": {"r1": self.r1, "r2": self.r2, "r3": self.r3},
            "vertex_dim": self.vertex_dim,
            "vertex_in_D1": self.vertex_dim >= 1,
            "rank2_points": [list(map(int, r)) for r in self.samples(2)],
        }


def _cone_points(field: Field) -> np.ndarray:
    pp = projective_points(field, 3)
    p = field.p
    n = len(pp)
    xi, yi, t = np.meshgrid(np.arange(n), np.arange(n), np.arange(p), indexing="ij")
    pts = np.concatenate([t.reshape(-1, 1), pp[xi.reshape(-1)], pp[yi.reshape(-1)]], axis=1)
    return pts


def scan_cone(abar: LagrangianSubspace, *, budget: int = 10**6) -> RankProfile:
    """Exhaustive rank classification of every F_p-point of the cone."""
    f = abar.field
    if not f.is_finite or f.degree != 1:
        raise ValueError("cone scans run over prime fields")
    p = f.p
    total = (p * p + p + 1) ** 2 * p + 1
    if total > budget:
        raise ValueError(f"cone scan of {total} points exceeds the budget {budget}")
    pts = _cone_points(f)
    dims = cone_dims(abar, pts)
    vals, cnts = np.unique(dims, return_counts=True)
    counts = {int(v): int(c) for v, c in zip(vals, cnts) if v > 0}
    vdim = vertex_rank(abar)
    if vdim > 0:
        counts[vdim] = counts.get(vdim, 0) + 1
    return RankProfile(p, counts, vdim, pts, dims)


def ruling_roots(abar: LagrangianSubspace, x: Sequence, y: Sequence) -> dict:
    """t-values on the ruling through (x, y) where the rank condition holds."""
    f = abar.field
    p = f.p
    ts = np.arange(p, dtype=np.int64)
    pts = np.zeros((p, 7), dtype=np.int64)
    pts[:, 0] = ts
    pts[:, 1:4] = [int(c) % p for c in x]
    pts[:, 4:7] = [int(c) % p for c in y]
    dims = cone_dims(abar, pts)
    roots = [int(t) for t in ts[dims >= 1]]
    return {"roots": roots, "dims": [int(d) for d in dims[dims >= 1]], "line_in_quartic": len(roots) > 4}


def _normalize(v: Sequence[int], p: int) -> tuple:
    v = [int(c) % p for c in v]
    lead = next(c for c in v if c)
    inv = pow(lead, -1, p)
    return tuple((c * inv) % p for c in v)


def _random_proj(rng: random.Random, p: int, n: int) -> tuple:
    while True:
        v = [rng.randrange(p) for _ in range(n)]
        if any(v):
            return _normalize(v, p)


def collect_d1_points(abar: LagrangianSubspace, count: int, rng: random.Random, exclude: set | None = None) -> np.ndarray:
    """Distinct points of the first degeneracy locus found on random rulings."""
    p = abar.field.p
    seen = set(exclude or ())
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 50 * count + 1000:
            raise RuntimeError("ruling search found too few points")
        x = _random_proj(rng, p, 3)
        y = _random_proj(rng, p, 3)
        res = ruling_roots(abar, x, y)
        for t in res["roots"]:
            pt = (t,) + x + y
            if pt not in seen:
                seen.add(pt)
                out.append(pt)
    return np.array(out[:count], dtype=np.int64)


# ---------------------------------------------------------------------------
# The graded quartic
# ---------------------------------------------------------------------------


def _evaluation_matrix(points: np.ndarray, p: int) -> np.ndarray:
    pts = np.asarray(points, dtype=np.int64) % p
    n = len(pts)
    tp = [np.ones(n, dtype=np.int64)]
    for _ in range(4):
        tp.append((tp[-1] * pts[:, 0]) % p)
    pw = {}
    for i in range(6):
        col = [np.ones(n, dtype=np.int64)]
        for _ in range(4):
            col.append((col[-1] * pts[:, 1 + i]) % p)
        pw[i] = col
    out = np.zeros((n, len(GRADED_BLOCKS)), dtype=np.int64)
    for j, (k, ex, ey) in enumerate(GRADED_BLOCKS):
        v = tp[4 - k].copy()
        for i, e in enumerate(ex + ey):
            if e:
                v = (v * pw[i][e]) % p
        out[:, j] = v
    return out


@dataclass
class EPWQuarticSection:
    """sum_k t^(4-k) g_k(x, y) over F_p, with g_k of bidegree (k, k)."""

    p: int
    coeffs: tuple
    nullity: int = 1

    def __post_init__(self) -> None:
        if len(self.coeffs) != len(GRADED_BLOCKS):
            raise ValueError("expected 371 coefficients")
        if not any(self.coeffs):
            raise ValueError("the graded quartic vanishes identically")

    @property
    def field(self) -> Field:
        return GF(self.p)

    def block(self, k: int) -> list[int]:
        start = sum(BLOCK_SIZES[:k])
        return list(self.coeffs[start : start + BLOCK_SIZES[k]])

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        m = _evaluation_matrix(points, self.p)
        return (m @ np.array(self.coeffs, dtype=np.int64)) % self.p

    def polynomial(self) -> dict:
        """{(t, x0, x1, x2, y0, y1, y2) exponents: coefficient}."""
        return {(4 - k,) + ex + ey: c for (k, ex, ey), c in zip(GRADED_BLOCKS, self.coeffs) if c}

    def restrict_to_x(self, x: Sequence[int]) -> Form:
        """The quartic in (t, y0, y1, y2) on the fiber over a fixed x."""
        f = self.field
        out: dict = {}
        for e, c in self.polynomial().items():
            val = c
            for i in range(3):
                val = (val * pow(int(x[i]), e[1 + i], self.p)) % self.p
            key = (e[0], e[4], e[5], e[6])
            out[key] = (out.get(key, 0) + val) % self.p
        return Form.from_dict(f, 4, 4, {k: v for k, v in out.items() if v})

    def restrict_to_y(self, y: Sequence[int]) -> Form:
        """The quartic in (t, x0, x1, x2) on the fiber over a fixed y."""
        f = self.field
        out: dict = {}
        for e, c in self.polynomial().items():
            val = c
            for i in range(3):
                val = (val * pow(int(y[i]), e[4 + i], self.p)) % self.p
            key = (e[0], e[1], e[2], e[3])
            out[key] = (out.get(key, 0) + val) % self.p
        return Form.from_dict(f, 4, 4, {k: v for k, v in out.items() if v})

    def to_json(self) -> dict:
        return {"p": self.p, "nullity": self.nullity, "blocks": [self.block(k) for k in range(5)]}


def interpolate_quartic(
    abar: LagrangianSubspace,
    rng: random.Random | None = None,
    *,
    points: np.ndarray | None = None,
    oversample: float = 1.2,
) -> EPWQuarticSection:
    """The graded quartic through the first degeneracy locus, from D1 points.

    The evaluation matrix on the collected points must have a one-dimensional
    nullspace; anything else is reported as an error.
    """
    f = abar.field
    p = f.p
    rng = rng or seeded_rng(0, "interpolate")
    if points is None:
        need = int(len(GRADED_BLOCKS) * oversample) + 1
        points = collect_d1_points(abar, need, rng)
    mat = _evaluation_matrix(points, p)
    null = nullspace_mod(mat, p)
    if len(null) != 1:
        raise ArithmeticError(f"interpolation nullspace has dimension {len(null)}, expected 1")
    vec = [int(c) for c in null[0]]
    lead = next(c for c in vec if c)
    inv = pow(lead, -1, p)
    return EPWQuarticSection(p, tuple((c * inv) % p for c in vec), len(null))


def validate_quartic(
    abar: LagrangianSubspace, section: EPWQuarticSection, rng: random.Random, *, fresh: int = 1000, exclude: set | None = None
) -> dict:
    """Vanishing versus the rank predicate on fresh random cone points and fresh D1 points."""
    p = section.p
    half = fresh // 2
    rand_pts = np.array(
        [(rng.randrange(p),) + _random_proj(rng, p, 3) + _random_proj(rng, p, 3) for _ in range(fresh - half)],
        dtype=np.int64,
    )
    d1_pts = collect_d1_points(abar, half, rng, exclude)
    pts = np.concatenate([rand_pts, d1_pts])
    dims = cone_dims(abar, pts)
    vanish = section.evaluate(pts) == 0
    mismatches = int(np.count_nonzero(vanish != (dims >= 1)))
    return {"points": int(len(pts)), "on_locus": int(np.count_nonzero(dims >= 1)), "mismatches": mismatches}


# ---------------------------------------------------------------------------
# Tangent cones at rank-2 points
# ---------------------------------------------------------------------------


def _poly_derivative(poly: dict, var: int, p: int) -> dict:
    out: dict = {}
    for e, c in poly.items():
        if e[var]:
            e2 = list(e)
            e2[var] -= 1
            key = tuple(e2)
            out[key] = (out.get(key, 0) + c * e[var]) % p
    return {k: v for k, v in out.items() if v}


def _poly_eval(poly: dict, point: Sequence[int], p: int) -> int:
    acc = 0
    for e, c in poly.items():
        v = c
        for x, k in zip(point, e):
            if k:
                v = (v * pow(int(x), k, p)) % p
        acc = (acc + v) % p
    return acc


def tangent_cone_check(section: EPWQuarticSection, points: np.ndarray) -> list[dict]:
    """Gradient and Hessian rank of the quartic in the affine cone chart at each point.

    The chart fixes the first nonzero coordinate of x and of y to 1 and keeps
    t and the other four coordinates free.
    """
    p = section.p
    f = section.field
    poly = section.polynomial()
    grads = [_poly_derivative(poly, v, p) for v in range(7)]
    hess = [[_poly_derivative(grads[i], j, p) for j in range(7)] for i in range(7)]
    out = []
    for pt in np.asarray(points, dtype=np.int64):
        pt = [int(c) for c in pt]
        kx = next((i for i in range(3) if pt[1 + i]), None)
        ky = next((i for i in range(3) if pt[4 + i]), None)
        if kx is None or ky is None or pt[1 + kx] != 1 or pt[4 + ky] != 1:
            raise ValueError("point is not normalized on the cone chart")
        chart = [0] + [1 + i for i in range(3) if i != kx] + [4 + i for i in range(3) if i != ky]
        value = _poly_eval(poly, pt, p)
        gradient = [_poly_eval(grads[v], pt, p) for v in chart]
        h = Matrix(f, [[_poly_eval(hess[i][j], pt, p) for j in chart] for i in chart])
        out.append(
            {
                "point": pt,
                "value": value,
                "gradient_zero": all(g == 0 for g in gradient),
                "hessian_rank": rank(h),
            }
        )
    return out


# ---------------------------------------------------------------------------
# The two Kummer fibrations
# ---------------------------------------------------------------------------


def _lift_full(abar: LagrangianSubspace) -> list[list]:
    """Rows of A = lift(A_bar) + ∧³U1 inside three-forms."""
    f = abar.field
    lift = _epw_lift(f)
    rows = [list((Matrix(f, [list(r)]) @ lift).row(0)) for r in abar.rows()]
    e123 = [f.zero] * 20
    e123[0] = f.one
    return rows + [e123]


def _fiber_reduction(abar: LagrangianSubspace, new_basis: list[list], w_rows: list[list]) -> LagrangianSubspace:
    """Image of A ∩ W^⊥ in W^⊥ / W, written in the frame V2 ⊗ ∧²V4 of the new basis.

    new_basis lists the vectors sent to e1, ..., e6: the first two span V2 and the
    last four span V4, with W = ∧²V2 ∧ V4 or ∧³V4 in those coordinates.
    """
    f = abar.field
    frame = eta_form(f)
    a_full = Subspace.from_rows(f, 20, _lift_full(abar))
    w = Subspace.from_rows(f, 20, w_rows)
    if intersect(a_full, w).dim != 1:
        raise ValueError("transversality fails: A meets W beyond ∧³U1")
    inside = intersect(a_full, frame.orthogonal(w))
    pmat = Matrix(f, new_basis).T  # columns are the new basis in old coordinates

    pinv = solve(pmat, Matrix.identity(f, 6))
    to_new = wedge3_matrix(pinv)
    emb = _kummer_embedding(f)
    kummer_idx = [next(j for j in range(20) if emb[r, j] != 0) for r in range(12)]
    signs = [emb[r, kummer_idx[r]] for r in range(12)]
    rows = []
    for r in inside.rows():
        new = (Matrix(f, [list(r)]) @ to_new).row(0)
        rows.append([f.mul(new[kummer_idx[k]], f.inv(signs[k])) for k in range(12)])
    sub = Subspace.from_rows(f, 12, rows)
    return LagrangianSubspace(sub, kummer_frame(f))


def _complement_basis(f: Field, vecs: list[list], n: int) -> list[list]:
    """Standard basis vectors completing vecs to a basis."""
    out = []
    current = [list(v) for v in vecs]
    for i in range(n):
        e = [f.zero] * n
        e[i] = f.one
        if rank(Matrix(f, current + [e])) > len(current):
            current.append(e)
            out.append(e)
    return out


def _k4_basis(f: Field, u2: Sequence) -> tuple[list, list]:
    """New basis (K2 then K4 = U1 + <u2>) for the fiber over u2."""
    u2v = [f.zero] * 3 + [f(c) if not isinstance(c, int) else c % f.p for c in u2]
    k4 = [[f.one if i == j else f.zero for i in range(6)] for j in range(3)] + [u2v]
    k2 = _complement_basis(f, k4, 6)
    return k2 + k4, k4


def fiber_lagrangian_K4(abar: LagrangianSubspace, u2: Sequence) -> LagrangianSubspace:
    """The 6-dim Lagrangian of the fiber over [u2] ∈ P(U2), in V2 ⊗ ∧²V4 with V2 = K2, V4 = K4."""
    f = abar.field
    basis, k4 = _k4_basis(f, u2)

    w_rows = [list(wedge_vectors(f, [k4[i] for i in trip]).coords) for trip in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))]
    return _fiber_reduction(abar, basis, w_rows)


def _m2_basis(f: Field, x: Sequence) -> tuple[list, list, list]:
    w1, w2, w3 = _plane_for(f, [c % f.p for c in x])
    z3 = [f.zero] * 3
    m1 = list(w1) + z3
    m2 = list(w2) + z3
    rest = [list(w3) + z3] + [[f.one if i == j else f.zero for i in range(6)] for j in range(3, 6)]
    return [m1, m2] + rest, [m1, m2], rest


def fiber_lagrangian_M2(abar: LagrangianSubspace, x: Sequence) -> LagrangianSubspace:
    """The 6-dim Lagrangian of the fiber over [x] = [∧²M2] ∈ P(∧²U1), with V2 = M2."""
    f = abar.field
    basis, m2, rest = _m2_basis(f, x)

    w_rows = [list(wedge_vectors(f, m2 + [v]).coords) for v in rest]
    return _fiber_reduction(abar, basis, w_rows)


def collect_rank2_points(abar: LagrangianSubspace, count: int, rng: random.Random) -> np.ndarray:
    """Rank-2 cone points from exhaustive scans of whole x-fibers taken in random order."""
    f = abar.field
    p = f.p
    xs = [tuple(int(c) for c in x) for x in projective_points(f, 3)]
    rng.shuffle(xs)
    found = []
    for x in xs:
        pts = _fiber_points_x(p, x)
        dims = cone_dims(abar, pts)
        found.extend(pts[dims == 2])
        if len(found) >= count:
            break
    return np.array(found, dtype=np.int64).reshape(-1, 7)


def _fiber_points_x(p: int, x: Sequence) -> np.ndarray:
    """Cone points over a fixed x with t varying, plus their fiber coordinates (t, y)."""
    f = GF(p)
    ys = projective_points(f, 3)
    t = np.repeat(np.arange(p), len(ys))
    yy = np.tile(ys, (p, 1))
    pts = np.zeros((len(t), 7), dtype=np.int64)
    pts[:, 0] = t
    pts[:, 1:4] = [int(c) for c in x]
    pts[:, 4:7] = yy
    return pts


def fiber_check_M2(
    abar: LagrangianSubspace, x: Sequence, section: EPWQuarticSection | None = None
) -> dict:
    """Compare the fiber Kummer over [x] with the rank predicate, the rank-2 points and the global quartic."""
    f = abar.field
    p = f.p
    x = _normalize(x, p)
    lag = fiber_lagrangian_M2(abar, x)
    quartic = kummer_from_lagrangian(lag, "Fv")
    pts = _fiber_points_x(p, x)
    dims = cone_dims(abar, pts)
    coords = np.concatenate([pts[:, :1], pts[:, 4:7]], axis=1)  # v = t w3 + y
    vdim = vertex_rank(abar)
    vals = quartic.form.evaluate_batch(coords)
    mismatch = int(np.count_nonzero((vals == 0) != (dims >= 1)))
    vertex_val = quartic.form([1, 0, 0, 0])
    mismatch += int((vertex_val == 0) != (vdim >= 1))
    nodes = node_scan(lag, quartic=quartic)
    cone_nodes = {tuple(int(c) for c in v) for v in coords[dims >= 2]}
    if vdim >= 2:
        cone_nodes.add((1, 0, 0, 0))
    node_set = {tuple(_normalize(pt, p)) for pt in nodes.points}
    cone_norm = {_normalize(v, p) for v in cone_nodes}
    out = {
        "x": list(x),
        "zero_set_mismatches": mismatch,
        "fiber_nodes": nodes.count,
        "nodes_match_rank2": node_set == cone_norm,
    }
    if section is not None:
        out["restriction_proportional"] = section.restrict_to_x(x).proportional(quartic.form)
    return out


def fiber_check_K4(
    abar: LagrangianSubspace, u2: Sequence, section: EPWQuarticSection | None = None
) -> dict:
    """Fiber Kummer over [u2] ∈ P(U2) in the dual coordinates u = (x23, -x13, x12, -t)."""
    f = abar.field
    p = f.p
    u2 = _normalize(u2, p)
    lag = fiber_lagrangian_K4(abar, u2)
    quartic = kummer_from_lagrangian(lag, "wedge2U")
    xs = projective_points(f, 3)
    t = np.repeat(np.arange(p), len(xs))
    xx = np.tile(xs, (p, 1))
    pts = np.zeros((len(t), 7), dtype=np.int64)
    pts[:, 0] = t
    pts[:, 1:4] = xx
    pts[:, 4:7] = list(u2)
    dims = cone_dims(abar, pts)
    cov = np.stack([xx[:, 2], (-xx[:, 1]) % p, xx[:, 0], (-t) % p], axis=1)
    _assert_covectors(f, u2, pts[:5], cov[:5])
    vals = quartic.form.evaluate_batch(cov)
    vdim = vertex_rank(abar)
    mismatch = int(np.count_nonzero((vals == 0) != (dims >= 1)))
    mismatch += int((quartic.form([0, 0, 0, 1]) == 0) != (vdim >= 1))
    nodes = node_scan(lag, quartic=quartic, flavor="wedge2U")
    cone_nodes = {_normalize(v, p) for v in cov[dims >= 2]}
    if vdim >= 2:
        cone_nodes.add((0, 0, 0, 1))
    node_set = {_normalize(pt, p) for pt in nodes.points}
    out = {
        "u2": list(u2),
        "zero_set_mismatches": mismatch,
        "fiber_nodes": nodes.count,
        "nodes_match_rank2": node_set == cone_nodes,
    }
    if section is not None:
        restricted = section.restrict_to_y(u2)
        # substitute u = (x23, -x13, x12, -t) into the dual quartic: variables (t, x12, x13, x23)
        sub = quartic.form.compose_linear([[0, 0, 0, 1], [0, 0, p - 1, 0], [0, 1, 0, 0], [p - 1, 0, 0, 0]])
        out["restriction_proportional"] = restricted.proportional(sub)
    return out


def _assert_covectors(f: Field, u2, pts, cov) -> None:
    """Check that u = (x23, -x13, x12, -t) annihilates U inside K4 = U1 + <u2>."""
    for pt, u in zip(pts, cov):
        cp = cone_point(f, int(pt[0]), [int(c) for c in pt[1:4]], [int(c) for c in pt[4:7]])
        for row in cp.u.rows():
            # coordinates in the basis (e1, e2, e3, u2): row = a e1 + b e2 + c e3 + d u2
            k = next(i for i in range(3) if u2[i])
            d = f.div(row[3 + k], u2[k])
            coords = [row[0], row[1], row[2], d]
            val = 0
            for a, b in zip(coords, u):
                val = f.add(val, f.mul(a, int(b)))
            if val != 0:
                raise AssertionError("dual coordinates of the fiber do not annihilate U")


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


def epw_report(p: int, seed: int, *, fibers: int = 2, interpolation_prime: int | None = None) -> dict:
    """Scan, interpolate, tangent cones and fiber checks for one seeded Lagrangian."""
    f = GF(p)
    rng = seeded_rng(seed, "epw", p)
    qprime, abar = random_admissible_lagrangian(f, rng)
    profile = scan_cone(abar)
    d1 = profile.points[profile.dims >= 1]
    report: dict = {"prime": p, "seed": seed, **profile.to_json()}
    report.pop("rank2_points")
    try:
        section = interpolate_quartic(abar, points=d1)
        report["interp_nullity"] = section.nullity
    except ArithmeticError as exc:
        section = None
        report["interp_nullity"] = None
        report["interp_error"] = str(exc)
    if section is not None:
        tc = tangent_cone_check(section, profile.samples(2))
        report["tangent_cones"] = {
            "samples": len(tc),
            "gradient_zero": sum(1 for r in tc if r["gradient_zero"]),
            "hessian_rank_3": sum(1 for r in tc if r["hessian_rank"] == 3),
        }
    fib_rng = seeded_rng(seed, "fibers", p)
    checks = []
    for _ in range(fibers):
        x = _random_proj(fib_rng, p, 3)
        checks.append({"kind": "M2", **fiber_check_M2(abar, x, section)})
        y = _random_proj(fib_rng, p, 3)
        checks.append({"kind": "K4", **fiber_check_K4(abar, y, section)})
    report["fiber_checks"] = checks
    if interpolation_prime:
        g = GF(interpolation_prime)
        irng = seeded_rng(seed, "epw-interp", interpolation_prime)
        _, abar_big = random_admissible_lagrangian(g, irng)
        big = interpolate_quartic(abar_big, irng)
        report["interpolation"] = {"prime": interpolation_prime, "nullity": big.nullity, **validate_quartic(abar_big, big, irng)}
    return report
