"""Points, planes and lines of PG(3,q).

Every projective object is kept in its canonical form: the leftmost
nonzero coordinate is one.  Lines are identified by their canonical
Plücker 6-tuple ``(p01, p02, p03, p12, p13, p23)``; the tuple is also packed
into an integer key (base q, ``p01`` most significant), which orders lines
lexicographically and is what the bulk routines hash and sort.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .gf import FieldElement, FieldSpec

PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
TRIPLES = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))
_PAIR_INDEX = {pr: n for n, pr in enumerate(PAIRS)}


class GeometryError(ValueError):
    pass


class CoincidentPoints(GeometryError):
    pass


class CoincidentPlanes(GeometryError):
    pass


class ParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# bulk kernels on index arrays


def normalize_rows(F: FieldSpec, A: np.ndarray) -> np.ndarray:
    """Scale each row so its first nonzero entry is one; zero rows stay zero."""
    A = np.asarray(A, dtype=F.dtype)
    if A.shape[0] == 0:
        return A.copy()
    nz = A != 0
    lead_col = np.argmax(nz, axis=1)
    lead = A[np.arange(A.shape[0]), lead_col]
    scale = F.inv_table[lead].astype(F.dtype)  # inv_table[0] == 0 keeps zero rows
    return F.vmul(A, scale[:, None])


def encode(F: FieldSpec, A: np.ndarray) -> np.ndarray:
    """Pack rows of field indices into int64 keys, first column most significant."""
    A = np.asarray(A)
    keys = np.zeros(A.shape[0], dtype=np.int64)
    for col in range(A.shape[1]):
        keys = keys * F.q + A[:, col]
    return keys


def decode(F: FieldSpec, keys: np.ndarray, width: int) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.int64)
    out = np.empty((keys.shape[0], width), dtype=F.dtype)
    k = keys.copy()
    for col in range(width - 1, -1, -1):
        out[:, col] = k % F.q
        k //= F.q
    return out


def plucker_rows(F: FieldSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Raw (unnormalized) Plücker coordinates of the lines X_n Y_n."""
    out = np.empty((X.shape[0], 6), dtype=F.dtype)
    for n, (i, j) in enumerate(PAIRS):
        out[:, n] = F.vsub(F.vmul(X[:, i], Y[:, j]), F.vmul(X[:, j], Y[:, i]))
    return out


def swap_dual(F: FieldSpec, D: np.ndarray) -> np.ndarray:
    """Convert between primal and dual Plücker coordinates (an involution)."""
    D = np.asarray(D, dtype=F.dtype)
    return np.stack(
        [D[:, 5], F.vneg(D[:, 4]), D[:, 3], D[:, 2], F.vneg(D[:, 1]), D[:, 0]], axis=1
    )


def matmul_rows(F: FieldSpec, A: np.ndarray, M: Sequence[Sequence[int]]) -> np.ndarray:
    """Row vectors times a matrix over GF(q): ``A @ M``."""
    M = np.asarray(M, dtype=np.int64)
    n_in, n_out = M.shape
    out = np.zeros((A.shape[0], n_out), dtype=F.dtype)
    for j in range(n_out):
        acc = out[:, j]
        for k in range(n_in):
            c = int(M[k, j])
            if c == 0:
                continue
            term = A[:, k] if c == 1 else F.vmul(A[:, k], c)
            acc = F.vadd(acc, term)
        out[:, j] = acc
    return out


def compound(F: FieldSpec, M: Sequence[Sequence[int]]) -> list[list[int]]:
    """Second compound of a 4x4 matrix: the action on Plücker row vectors.

    If points transform as ``x -> x M`` then lines transform as
    ``p -> p C`` with ``C[(k,l),(i,j)] = M[k][i] M[l][j] - M[l][i] M[k][j]``.
    """
    M = [[int(v) for v in row] for row in M]
    C = [[0] * 6 for _ in range(6)]
    for r, (k, l) in enumerate(PAIRS):
        for s, (i, j) in enumerate(PAIRS):
            C[r][s] = F.sub(F.mul(M[k][i], M[l][j]), F.mul(M[l][i], M[k][j]))
    return C


# ---------------------------------------------------------------------------
# scalar objects


def _coerce(F: FieldSpec, coords: Iterable) -> tuple[int, ...]:
    out = []
    for c in coords:
        if isinstance(c, FieldElement):
            F._check(c)
            out.append(c.index)
        else:
            c = int(c)
            if not 0 <= c < F.q:
                raise ValueError(f"coordinate index {c} outside GF({F.q})")
            out.append(c)
    return tuple(out)


def normalize(F: FieldSpec, coords: Iterable) -> tuple[int, ...]:
    v = _coerce(F, coords)
    for c in v:
        if c:
            s = F.inv(c)
            return tuple(F.mul(s, x) for x in v)
    raise GeometryError("the zero vector is not a projective object")


def _dot(F: FieldSpec, a: Sequence[int], b: Sequence[int]) -> int:
    acc = 0
    for x, y in zip(a, b):
        acc = F.add(acc, F.mul(x, y))
    return acc


@dataclass(frozen=True)
class Point:
    field: FieldSpec = dc_field(repr=False)
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != 4:
            raise GeometryError("points of PG(3,q) have four coordinates")
        object.__setattr__(self, "coords", normalize(self.field, self.coords))

    def __str__(self):
        return ":".join(map(str, self.coords))


@dataclass(frozen=True)
class Plane:
    field: FieldSpec = dc_field(repr=False)
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != 4:
            raise GeometryError("planes of PG(3,q) have four coefficients")
        object.__setattr__(self, "coeffs", normalize(self.field, self.coeffs))

    def __contains__(self, P: Point) -> bool:
        return incident_point_plane(P, self)

    def __str__(self):
        return "[" + ":".join(map(str, self.coeffs)) + "]"


@dataclass(frozen=True, eq=False)
class PluckerLine:
    """A line, compared and hashed by its canonical Plücker tuple only."""

    field: FieldSpec = dc_field(repr=False)
    pluecker: tuple[int, ...]
    span: tuple[Point, Point] = dc_field(repr=False, default=None)

    def __post_init__(self):
        F = self.field
        p = normalize(F, self.pluecker)
        if _quadric(F, p) != 0:
            raise GeometryError(f"{p} violates the Klein quadric relation")
        object.__setattr__(self, "pluecker", p)
        if self.span is None:
            object.__setattr__(self, "span", _span_from_pluecker(F, p))

    @classmethod
    def from_key(cls, F: FieldSpec, key: int) -> PluckerLine:
        return cls(F, tuple(int(v) for v in decode(F, np.array([key]), 6)[0]))

    @property
    def key(self) -> int:
        k = 0
        for v in self.pluecker:
            k = k * self.field.q + v
        return k

    def matrix(self) -> list[list[int]]:
        """Skew 4x4 matrix x y^T - y x^T of the line."""
        F = self.field
        L = [[0] * 4 for _ in range(4)]
        for (i, j), v in zip(PAIRS, self.pluecker):
            L[i][j] = v
            L[j][i] = F.neg(v)
        return L

    def points(self) -> list[Point]:
        """The q+1 points of the line."""
        F = self.field
        x, y = self.span[0].coords, self.span[1].coords
        pts = [self.span[1]]
        for lam in range(F.q):
            pts.append(Point(F, [F.add(a, F.mul(lam, b)) for a, b in zip(x, y)]))
        return pts

    def __eq__(self, other):
        if not isinstance(other, PluckerLine):
            return NotImplemented
        return self.pluecker == other.pluecker and self.field == other.field

    def __hash__(self):
        return hash(self.pluecker)

    def __contains__(self, P: Point) -> bool:
        return point_on_line(P, self)

    def __str__(self):
        return "(" + ":".join(map(str, self.pluecker)) + ")"


def _quadric(F: FieldSpec, p: Sequence[int]) -> int:
    p01, p02, p03, p12, p13, p23 = p
    return F.add(F.sub(F.mul(p01, p23), F.mul(p02, p13)), F.mul(p03, p12))


def _span_from_pluecker(F: FieldSpec, p: Sequence[int]) -> tuple[Point, Point]:
    # columns of x y^T - y x^T are points of the line
    cols = []
    for k in range(4):
        col = []
        for i in range(4):
            if i == k:
                col.append(0)
            elif i < k:
                col.append(p[_PAIR_INDEX[(i, k)]])
            else:
                col.append(F.neg(p[_PAIR_INDEX[(k, i)]]))
        if any(col):
            cols.append(Point(F, col))
    first = cols[0]
    for other in cols[1:]:
        if other != first:
            return first, other
    raise GeometryError(f"{tuple(p)} is not a line")  # pragma: no cover


def line_from_points(A: Point, B: Point) -> PluckerLine:
    F = A.field
    if B.field != F:
        from .gf import SpecMismatch

        raise SpecMismatch("points over different fields")
    if A == B:
        raise CoincidentPoints(f"{A} == {B}")
    x, y = A.coords, B.coords
    p = [F.sub(F.mul(x[i], y[j]), F.mul(x[j], y[i])) for i, j in PAIRS]
    return PluckerLine(F, tuple(p), (A, B))


def line_from_planes(a: Plane, b: Plane) -> PluckerLine:
    F = a.field
    if a == b:
        raise CoincidentPlanes(f"{a} == {b}")
    x, y = a.coeffs, b.coeffs
    d = [F.sub(F.mul(x[i], y[j]), F.mul(x[j], y[i])) for i, j in PAIRS]
    p = (d[5], F.neg(d[4]), d[3], d[2], F.neg(d[1]), d[0])
    return PluckerLine(F, p)


def incident_point_plane(P: Point, pi: Plane) -> bool:
    return _dot(P.field, P.coords, pi.coeffs) == 0


def point_on_line(P: Point, line: PluckerLine) -> bool:
    F = P.field
    x, p = P.coords, line.pluecker
    for i, j, k in TRIPLES:
        v = F.sub(F.mul(x[i], p[_PAIR_INDEX[(j, k)]]), F.mul(x[j], p[_PAIR_INDEX[(i, k)]]))
        if F.add(v, F.mul(x[k], p[_PAIR_INDEX[(i, j)]])) != 0:
            return False
    return True


def line_in_plane(line: PluckerLine, pi: Plane) -> bool:
    L = line.matrix()
    F = line.field
    c = pi.coeffs
    return all(_dot(F, c, [L[i][k] for i in range(4)]) == 0 for k in range(4))


def lines_meet(l1: PluckerLine, l2: PluckerLine) -> bool:
    """True when the lines share a point (in particular when equal)."""
    F = l1.field
    a, b = l1.pluecker, l2.pluecker
    terms = [
        F.mul(a[0], b[5]), F.neg(F.mul(a[1], b[4])), F.mul(a[2], b[3]),
        F.mul(a[3], b[2]), F.neg(F.mul(a[4], b[1])), F.mul(a[5], b[0]),
    ]
    acc = 0
    for t in terms:
        acc = F.add(acc, t)
    return acc == 0


def line_plane_meet(line: PluckerLine, pi: Plane) -> Point | None:
    """The point where the line meets the plane, or None if the line lies in it."""
    F = line.field
    L = line.matrix()
    v = [_dot(F, L[i], pi.coeffs) for i in range(4)]
    return Point(F, v) if any(v) else None


# ---------------------------------------------------------------------------
# enumeration


@functools.lru_cache(maxsize=8)
def point_array(F: FieldSpec) -> np.ndarray:
    """All points (or plane coefficient vectors) as a sorted (N,4) index array."""
    q = F.q
    blocks = []
    for lead in range(4):
        rest = 3 - lead
        tail = np.array(list(itertools.product(range(q), repeat=rest)), dtype=F.dtype)
        tail = tail.reshape(q**rest, rest)
        block = np.zeros((tail.shape[0], 4), dtype=F.dtype)
        block[:, lead] = 1
        block[:, lead + 1 :] = tail
        blocks.append(block)
    A = np.concatenate(blocks)
    order = np.argsort(encode(F, A), kind="stable")
    A = A[order]
    A.setflags(write=False)
    return A


def all_points(F: FieldSpec) -> list[Point]:
    return [Point(F, tuple(int(v) for v in row)) for row in point_array(F)]


def all_planes(F: FieldSpec) -> list[Plane]:
    return [Plane(F, tuple(int(v) for v in row)) for row in point_array(F)]


def _echelon_spans(F: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    """Both rows of every 2x4 reduced row echelon matrix of rank two."""
    q = F.q
    Xs, Ys = [], []
    for c1, c2 in itertools.combinations(range(4), 2):
        # free entries: right of the pivot in each row, excluding pivot columns
        free1 = [j for j in range(c1 + 1, 4) if j != c2]
        free2 = [j for j in range(c2 + 1, 4)]
        n_free = len(free1) + len(free2)
        vals = np.array(list(itertools.product(range(q), repeat=n_free)), dtype=F.dtype)
        vals = vals.reshape(q**n_free, n_free)
        X = np.zeros((vals.shape[0], 4), dtype=F.dtype)
        Y = np.zeros((vals.shape[0], 4), dtype=F.dtype)
        X[:, c1] = 1
        Y[:, c2] = 1
        for n, j in enumerate(free1):
            X[:, j] = vals[:, n]
        for n, j in enumerate(free2):
            Y[:, j] = vals[:, len(free1) + n]
        Xs.append(X)
        Ys.append(Y)
    return np.concatenate(Xs), np.concatenate(Ys)


def _pair_keys(F: FieldSpec, chunk: int = 1 << 20) -> np.ndarray:
    pts = point_array(F)
    n = pts.shape[0]
    found = []
    for i in range(n - 1):
        j = np.arange(i + 1, n)
        X = np.broadcast_to(pts[i], (j.size, 4))
        P = normalize_rows(F, plucker_rows(F, X, pts[j]))
        found.append(np.unique(encode(F, P)))
        if sum(a.size for a in found) > chunk:
            found = [np.unique(np.concatenate(found))]
    return np.unique(np.concatenate(found))


class LineTable:
    """A sorted set of canonical line keys over one field."""

    def __init__(self, F: FieldSpec, keys: np.ndarray, *, assume_sorted: bool = False):
        self.field = F
        keys = np.asarray(keys, dtype=np.int64)
        if not assume_sorted:
            keys = np.unique(keys)
        self.keys = keys

    def __len__(self) -> int:
        return int(self.keys.size)

    def __iter__(self) -> Iterator[PluckerLine]:
        for k in self.keys:
            yield PluckerLine.from_key(self.field, int(k))

    def __contains__(self, line) -> bool:
        k = line.key if isinstance(line, PluckerLine) else int(line)
        i = np.searchsorted(self.keys, k)
        return bool(i < self.keys.size and self.keys[i] == k)

    def coords(self) -> np.ndarray:
        return decode(self.field, self.keys, 6)

    def index_of(self, keys: np.ndarray) -> np.ndarray:
        """Positions of ``keys`` in the table; -1 where absent."""
        keys = np.asarray(keys, dtype=np.int64)
        idx = np.searchsorted(self.keys, keys)
        idx = np.minimum(idx, max(self.keys.size - 1, 0))
        hit = self.keys[idx] == keys if self.keys.size else np.zeros(keys.shape, bool)
        return np.where(hit, idx, -1)


@functools.lru_cache(maxsize=4)
def _all_line_keys(F: FieldSpec, method: str) -> np.ndarray:
    if method == "pairs":
        keys = _pair_keys(F)
    else:
        X, Y = _echelon_spans(F)
        keys = np.sort(encode(F, normalize_rows(F, plucker_rows(F, X, Y))))
    keys.setflags(write=False)
    return keys


def all_lines(F: FieldSpec, method: str = "echelon") -> LineTable:
    """Every line of PG(3,q), sorted by key.

    ``method="echelon"`` generates each line once from its reduced row
    echelon basis; ``method="pairs"`` joins all point pairs and deduplicates.
    """
    if method not in ("echelon", "pairs"):
        raise ValueError(f"unknown enumeration method {method!r}")
    return LineTable(F, _all_line_keys(F, method), assume_sorted=True)


def line_keys_from_points(F: FieldSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return encode(F, normalize_rows(F, plucker_rows(F, X, Y)))


def line_keys_from_planes(F: FieldSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return encode(F, normalize_rows(F, swap_dual(F, plucker_rows(F, A, B))))


def star_keys(F: FieldSpec, P: Sequence[int], *, dual: bool = False) -> np.ndarray:
    """Keys of the q^2+q+1 lines through a point (``dual``: lying in a plane)."""
    P = np.asarray(P, dtype=F.dtype)
    k = int(np.flatnonzero(P)[0])
    pts = point_array(F)
    others = pts[pts[:, k] == 0]
    X = np.broadcast_to(P, others.shape)
    raw = plucker_rows(F, X, others)
    if dual:
        raw = swap_dual(F, raw)
    return encode(F, normalize_rows(F, raw))


def points_on_lines_mask(F: FieldSpec, x: Sequence[int], P: np.ndarray) -> np.ndarray:
    """Boolean mask: does the point ``x`` lie on each line (rows of Plücker coords)?"""
    x = [int(v) for v in x]
    ok = np.ones(P.shape[0], dtype=bool)
    for i, j, k in TRIPLES:
        v = F.vsub(F.vmul(P[:, _PAIR_INDEX[(j, k)]], x[i]), F.vmul(P[:, _PAIR_INDEX[(i, k)]], x[j]))
        v = F.vadd(v, F.vmul(P[:, _PAIR_INDEX[(i, j)]], x[k]))
        ok &= v == 0
    return ok


def count_lines(q: int) -> int:
    return (q * q + 1) * (q * q + q + 1)


def count_points(q: int) -> int:
    return q**3 + q**2 + q + 1


# ---------------------------------------------------------------------------
# text format


def _parse_tuple(F: FieldSpec, text: str, width: int) -> tuple[int, ...]:
    parts = [t.strip() for t in text.split(":")]
    if len(parts) != width:
        raise ParseError(f"expected {width} ':'-separated entries in {text!r}")
    out = []
    for t in parts:
        if t == "rho":
            out.append(F.nonsquare().index)
            continue
        try:
            v = int(t)
        except ValueError:
            raise ParseError(f"bad field index {t!r}") from None
        if not 0 <= v < F.q:
            raise ParseError(f"field index {v} outside GF({F.q})")
        out.append(v)
    return tuple(out)


def parse_point(F: FieldSpec, text: str) -> Point:
    return Point(F, _parse_tuple(F, text, 4))


def parse_plane(F: FieldSpec, text: str) -> Plane:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ParseError(f"plane must look like [c0:c1:c2:c3], got {text!r}")
    return Plane(F, _parse_tuple(F, text[1:-1], 4))


def parse_line(F: FieldSpec, text: str) -> PluckerLine:
    """Parse ``(p01:...:p23)``, ``x0:x1:x2:x3;y0:y1:y2:y3`` or ``[..];[..]``.

    The token ``rho`` stands for the field's designated non-square.
    """
    text = text.strip()
    try:
        if text.startswith("("):
            if not text.endswith(")"):
                raise ParseError(f"unterminated line {text!r}")
            return PluckerLine(F, _parse_tuple(F, text[1:-1], 6))
        halves = text.split(";")
        if len(halves) != 2:
            raise ParseError(f"line needs two points or two planes: {text!r}")
        if halves[0].strip().startswith("["):
            return line_from_planes(parse_plane(F, halves[0]), parse_plane(F, halves[1]))
        return line_from_points(parse_point(F, halves[0]), parse_point(F, halves[1]))
    except GeometryError as exc:
        raise ParseError(str(exc)) from exc
