"""The stabilizer group of the twisted cubic and its actions on PG(3,q).

A group element is the projectivity with matrix ``M(a,b,c,d)`` (the induced
action of ``t -> (a t + b)/(c t + d)`` on binary cubic forms).  Points are
row vectors and map as ``x -> x M``; planes are column vectors and map as
``c -> M^{-1} c``.  Products read left to right: ``g * h`` applies g first.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .gf import FieldSpec
from .pg3 import (
    Plane,
    PluckerLine,
    Point,
    compound,
    encode,
    line_from_planes,
    line_from_points,
    matmul_rows,
    normalize,
    normalize_rows,
    plucker_rows,
    swap_dual,
)

INF = "inf"


class WrongCharacteristic(ValueError):
    pass


class ClosureMismatch(RuntimeError):
    pass


class Singular(ValueError):
    pass


def _matrix_entries(F: FieldSpec, a, b, c, d) -> list[list[np.ndarray]]:
    """Entries of M(a,b,c,d) for index arrays a, b, c, d."""
    mul, add = F.vmul, F.vadd
    two, three = F.from_int(2), F.from_int(3)
    a2, b2, c2, d2 = mul(a, a), mul(b, b), mul(c, c), mul(d, d)
    ab, ac, bc = mul(a, b), mul(a, c), mul(b, c)
    return [
        [mul(a2, a), mul(a2, c), mul(a, c2), mul(c2, c)],
        [mul(three, mul(a2, b)), add(mul(a2, d), mul(two, mul(ab, c))),
         add(mul(b, c2), mul(two, mul(ac, d))), mul(three, mul(c2, d))],
        [mul(three, mul(a, b2)), add(mul(b2, c), mul(two, mul(ab, d))),
         add(mul(a, d2), mul(two, mul(bc, d))), mul(three, mul(c, d2))],
        [mul(b2, b), mul(b2, d), mul(b, d2), mul(d2, d)],
    ]


def group_matrix(F: FieldSpec, a: int, b: int, c: int, d: int) -> list[list[int]]:
    arr = [np.array([v], dtype=F.dtype) for v in (a, b, c, d)]
    return [[int(e[0]) for e in row] for row in _matrix_entries(F, *arr)]


def _det2(F: FieldSpec, a, b, c, d) -> int:
    return F.sub(F.mul(a, d), F.mul(b, c))


def _compose_params(F: FieldSpec, g: Sequence[int], h: Sequence[int]) -> tuple[int, ...]:
    # (t,1) [[a,c],[b,d]]: g then h is the 2x2 product A_g A_h
    a1, b1, c1, d1 = g
    a2, b2, c2, d2 = h
    m, s = F.mul, F.add
    return normalize(F, (
        s(m(a1, a2), m(c1, b2)),
        s(m(b1, a2), m(d1, b2)),
        s(m(a1, c2), m(c1, d2)),
        s(m(b1, c2), m(d1, d2)),
    ))


@dataclass(frozen=True, eq=False)
class GroupElement:
    field: FieldSpec
    params: tuple[int, ...]

    def __post_init__(self):
        p = normalize(self.field, self.params)
        if _det2(self.field, *p) == 0:
            raise Singular(f"ad - bc = 0 for {p}")
        object.__setattr__(self, "params", p)

    @functools.cached_property
    def matrix(self) -> list[list[int]]:
        return group_matrix(self.field, *self.params)

    @functools.cached_property
    def inverse_matrix(self) -> list[list[int]]:
        return linalg.inverse(self.field, self.matrix)

    def __mul__(self, other: GroupElement) -> GroupElement:
        return GroupElement(self.field, _compose_params(self.field, self.params, other.params))

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.params == other.params and self.field == other.field

    def __hash__(self):
        return hash(self.params)

    def __str__(self):
        return "(" + ":".join(map(str, self.params)) + ")"

    def move_param(self, t):
        """Image of the curve parameter t (an index or ``INF``)."""
        F = self.field
        a, b, c, d = self.params
        if t == INF:
            num, den = a, c
        else:
            num, den = F.add(F.mul(a, t), b), F.add(F.mul(c, t), d)
        return INF if den == 0 else F.div(num, den)


def identity(F: FieldSpec) -> GroupElement:
    return GroupElement(F, (1, 0, 0, 1))


def invert(g: GroupElement) -> GroupElement:
    F = g.field
    a, b, c, d = g.params
    return GroupElement(F, (d, F.neg(b), F.neg(c), a))


def closed_form_inverse(g: GroupElement) -> list[list[int]]:
    """Inverse matrix from the explicit adjugate-type formula.

    With ``A = a^3 d^3 - b^3 c^3 + 3ab^2c^2d - 3a^2bcd^2 = (ad-bc)^3`` the
    inverse is the displayed polynomial matrix divided by A, with the
    checkerboard signs ``(-1)^(i+j)``.
    """
    F = g.field
    a, b, c, d = g.params
    m, s = F.mul, F.add
    n = F.from_int
    cube = lambda x: m(m(x, x), x)  # noqa: E731
    A = F.sub(
        s(F.sub(m(cube(a), cube(d)), m(cube(b), cube(c))), m(n(3), m(m(a, m(b, b)), m(m(c, c), d)))),
        m(n(3), m(m(m(a, a), b), m(c, m(d, d)))),
    )
    if A == 0:
        raise Singular("zero determinant")
    ad, bc = m(a, d), m(b, c)
    entries = [
        [m(m(d, d), d), m(c, m(d, d)), m(m(c, c), d), m(m(c, c), c)],
        [m(n(3), m(b, m(d, d))), m(d, s(ad, m(n(2), bc))), m(c, s(m(n(2), ad), bc)), m(n(3), m(a, m(c, c)))],
        [m(n(3), m(m(b, b), d)), m(b, s(m(n(2), ad), bc)), m(a, s(ad, m(n(2), bc))), m(n(3), m(m(a, a), c))],
        [m(m(b, b), b), m(a, m(b, b)), m(m(a, a), b), m(m(a, a), a)],
    ]
    Ainv = F.inv(A)
    return [
        [m(Ainv, v if (i + j) % 2 == 0 else F.neg(v)) for j, v in enumerate(row)]
        for i, row in enumerate(entries)
    ]


# ---------------------------------------------------------------------------
# actions


def apply_point(g: GroupElement, P: Point) -> Point:
    return Point(P.field, linalg.vecmat(P.field, P.coords, g.matrix))


def apply_plane(g: GroupElement, pi: Plane) -> Plane:
    return Plane(pi.field, linalg.matvec(pi.field, g.inverse_matrix, pi.coeffs))


def apply_line(g: GroupElement, line: PluckerLine) -> PluckerLine:
    A, B = line.span
    return line_from_points(apply_point(g, A), apply_point(g, B))


def line_compound(g: GroupElement) -> list[list[int]]:
    return compound(g.field, g.matrix)


def apply_lines(F: FieldSpec, coords: np.ndarray, g: GroupElement) -> np.ndarray:
    """Keys of the images of many lines (rows of canonical Plücker coords)."""
    return encode(F, normalize_rows(F, matmul_rows(F, coords, line_compound(g))))


def apply_points(F: FieldSpec, pts: np.ndarray, g: GroupElement) -> np.ndarray:
    return normalize_rows(F, matmul_rows(F, pts, g.matrix))


def apply_planes(F: FieldSpec, planes: np.ndarray, g: GroupElement) -> np.ndarray:
    # c -> M^{-1} c is the row-vector map c -> c (M^{-1})^T
    Minv_t = [list(col) for col in zip(*g.inverse_matrix)]
    return normalize_rows(F, matmul_rows(F, planes, Minv_t))


# ---------------------------------------------------------------------------
# the whole group


@functools.lru_cache(maxsize=4)
def group_params(F: FieldSpec) -> np.ndarray:
    """Normalized (a,b,c,d) with ad-bc != 0, sorted; shape (q^3-q, 4)."""
    q = F.q
    r = np.arange(q, dtype=F.dtype)
    bb, cc, dd = (x.ravel() for x in np.meshgrid(r, r, r, indexing="ij"))
    lead_a = np.stack([np.ones_like(bb), bb, cc, dd], axis=1)
    c2, d2 = (x.ravel() for x in np.meshgrid(r, r, indexing="ij"))
    lead_b = np.stack([np.zeros_like(c2), np.ones_like(c2), c2, d2], axis=1)
    P = np.concatenate([lead_a, lead_b])
    det = F.vsub(F.vmul(P[:, 0], P[:, 3]), F.vmul(P[:, 1], P[:, 2]))
    P = P[det != 0]
    P = P[np.argsort(encode(F, P), kind="stable")]
    P.setflags(write=False)
    return P


@functools.lru_cache(maxsize=4)
def group_matrices(F: FieldSpec) -> np.ndarray:
    """Matrices M(a,b,c,d) for every element, aligned with group_params."""
    P = group_params(F)
    ent = _matrix_entries(F, P[:, 0], P[:, 1], P[:, 2], P[:, 3])
    M = np.stack([np.stack(row, axis=1) for row in ent], axis=1)
    M.setflags(write=False)
    return M


def group_elements(F: FieldSpec) -> list[GroupElement]:
    return [GroupElement(F, tuple(int(v) for v in row)) for row in group_params(F)]


def group_order(F: FieldSpec) -> int:
    return F.q**3 - F.q


def images_of_point(F: FieldSpec, x: Sequence[int], mats: np.ndarray) -> np.ndarray:
    """Rows x M for every matrix in the stack (unnormalized)."""
    out = np.zeros((mats.shape[0], 4), dtype=F.dtype)
    for j in range(4):
        acc = out[:, j]
        for k in range(4):
            if x[k]:
                acc = F.vadd(acc, F.vmul(mats[:, k, j], int(x[k])))
        out[:, j] = acc
    return out


def line_orbit_keys(F: FieldSpec, line: PluckerLine, mats: np.ndarray | None = None) -> np.ndarray:
    """Sorted distinct keys of the images of ``line`` under a stack of matrices."""
    if mats is None:
        mats = group_matrices(F)
    X = images_of_point(F, line.span[0].coords, mats)
    Y = images_of_point(F, line.span[1].coords, mats)
    return np.unique(encode(F, normalize_rows(F, plucker_rows(F, X, Y))))


def matrices_of(F: FieldSpec, elements: Sequence[GroupElement]) -> np.ndarray:
    if not elements:
        return np.zeros((0, 4, 4), dtype=F.dtype)
    P = np.array([g.params for g in elements], dtype=F.dtype)
    ent = _matrix_entries(F, P[:, 0], P[:, 1], P[:, 2], P[:, 3])
    return np.stack([np.stack(row, axis=1) for row in ent], axis=1)


# ---------------------------------------------------------------------------
# null polarity


def _require_polarity(F: FieldSpec) -> None:
    if F.xi == 0:
        raise WrongCharacteristic(f"no null polarity of the cubic for q = {F.q} (q = 0 mod 3)")


def polarity_matrix(F: FieldSpec) -> list[list[int]]:
    """N with (x0,x1,x2,x3) N = (x3, -3x2, 3x1, -x0)."""
    three = F.from_int(3)
    N = [[0] * 4 for _ in range(4)]
    N[3][0] = 1
    N[2][1] = F.neg(three)
    N[1][2] = three
    N[0][3] = F.neg(1)
    return N


def polarity_point(P: Point) -> Plane:
    _require_polarity(P.field)
    return Plane(P.field, linalg.vecmat(P.field, P.coords, polarity_matrix(P.field)))


def polarity_plane(pi: Plane) -> Point:
    """Pole of a plane (inverse of polarity_point)."""
    F = pi.field
    _require_polarity(F)
    Ninv = linalg.inverse(F, polarity_matrix(F))
    return Point(F, linalg.vecmat(F, pi.coeffs, Ninv))


def polarity_line(line: PluckerLine) -> PluckerLine:
    A, B = line.span
    return line_from_planes(polarity_point(A), polarity_point(B))


def polarity_lines(F: FieldSpec, coords: np.ndarray) -> np.ndarray:
    """Keys of the polar lines of many lines."""
    _require_polarity(F)
    dual = matmul_rows(F, coords, compound(F, polarity_matrix(F)))
    return encode(F, normalize_rows(F, swap_dual(F, dual)))


# ---------------------------------------------------------------------------
# stabilizers and generators


def cubic_point_coords(F: FieldSpec, t) -> tuple[int, ...]:
    if t == INF:
        return (1, 0, 0, 0)
    t2 = F.mul(t, t)
    return normalize(F, (F.mul(t2, t), t2, t, 1))


def axis_point_coords(F: FieldSpec, t) -> tuple[int, ...]:
    return (0, 0, 1, 0) if t == INF else (0, 1, int(t), 0)


def transporter(F: FieldSpec, src: Sequence[int], dst: Sequence[int]) -> GroupElement:
    """Least-index element mapping the point src to the point dst."""
    src = normalize(F, src)
    dst = np.array(normalize(F, dst), dtype=F.dtype)
    img = normalize_rows(F, images_of_point(F, src, group_matrices(F)))
    hits = np.flatnonzero(np.all(img == dst, axis=1))
    if hits.size == 0:
        raise ValueError(f"no group element maps {src} to {tuple(dst)}")
    return GroupElement(F, tuple(int(v) for v in group_params(F)[hits[0]]))


def conjugate(F: FieldSpec, elements: Sequence[GroupElement], psi: GroupElement) -> list[GroupElement]:
    psi_inv = invert(psi)
    out = {psi_inv * g * psi for g in elements}
    return sorted(out, key=lambda g: g.params)


def stabilizer_cubic_point(F: FieldSpec, t) -> list[GroupElement]:
    """Elements fixing P(t): the (1,0,c,d) family at t = 0, conjugates elsewhere."""
    base = [GroupElement(F, (1, 0, c, d)) for c in range(F.q) for d in range(1, F.q)]
    if t == 0:
        return base
    psi = transporter(F, cubic_point_coords(F, 0), cubic_point_coords(F, t))
    return conjugate(F, base, psi)


def stabilizer_axis_point(F: FieldSpec, t) -> list[GroupElement]:
    """Elements fixing the axis point (0,1,t,0) (or (0,0,1,0) for INF); q = 0 mod 3."""
    if F.xi != 0:
        raise WrongCharacteristic(f"the osculating planes share no axis for q = {F.q}")
    base = [GroupElement(F, (1, b, 0, d)) for b in range(F.q) for d in range(1, F.q)]
    if t == 0:
        return base
    psi = transporter(F, axis_point_coords(F, 0), axis_point_coords(F, t))
    return conjugate(F, base, psi)


def _param_closure(F: FieldSpec, gens: Sequence[tuple[int, ...]], limit: int) -> int:
    seen = {normalize(F, (1, 0, 0, 1))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _compose_params(F, x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if len(seen) > limit:
            break
        frontier = nxt
    return len(seen)


@functools.lru_cache(maxsize=8)
def generators(F: FieldSpec) -> tuple[GroupElement, ...]:
    """t -> t+1, t -> g t (g primitive), t -> 1/t; closure is checked."""
    gens = (
        GroupElement(F, (1, 1, 0, 1)),
        GroupElement(F, (F.primitive, 0, 0, 1)),
        GroupElement(F, (0, 1, 1, 0)),
    )
    size = _param_closure(F, [g.params for g in gens], group_order(F))
    if size != group_order(F):
        raise ClosureMismatch(f"generators close to {size} elements, expected {group_order(F)}")
    return gens
