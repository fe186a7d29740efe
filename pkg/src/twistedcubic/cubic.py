"""The twisted cubic, its osculating developable and the type of every line.

The curve is ``P(t) = (t^3, t^2, t, 1)`` for t in GF(q) plus
``P(inf) = (1, 0, 0, 0)``; the osculating plane at ``P(t)`` is
``(1, -3t, 3t^2, -t^3)`` and at infinity ``(0, 0, 0, 1)``.  Curve parameters
are field indices, with the string ``"inf"`` for the point at infinity.
"""
from __future__ import annotations

import enum
import functools
import itertools
import random
from dataclasses import dataclass

import numpy as np

from . import linalg
from .action import INF, WrongCharacteristic, cubic_point_coords, polarity_lines
from .gf import FieldSpec
from .pg3 import (
    PAIRS,
    LineTable,
    Plane,
    PluckerLine,
    Point,
    all_lines,
    encode,
    incident_point_plane,
    line_from_planes,
    line_from_points,
    line_in_plane,
    line_keys_from_planes,
    line_keys_from_points,
    lines_meet,
    matmul_rows,
    normalize_rows,
    point_array,
    point_on_line,
    star_keys,
)


class LineClass(str, enum.Enum):
    RC = "RC"
    RA = "RA"
    T = "T"
    IC = "IC"
    IA = "IA"
    UG = "UG"
    UnG = "UnG"
    EG = "EG"
    EnG = "EnG"
    A = "A"
    EA = "EA"

    @property
    def symbol(self) -> str:
        return self.value.replace("G", "Γ")


LINE_TYPES_NONZERO = (LineClass.RC, LineClass.RA, LineClass.T, LineClass.IC, LineClass.IA,
                      LineClass.UG, LineClass.UnG, LineClass.EG, LineClass.EnG)
LINE_TYPES_ZERO = (LineClass.RC, LineClass.T, LineClass.IC, LineClass.UG, LineClass.UnG,
                   LineClass.EnG, LineClass.A, LineClass.EA)
ALL_LINE_TYPES = tuple(LineClass)


def line_types(xi: int) -> tuple[LineClass, ...]:
    return LINE_TYPES_ZERO if xi == 0 else LINE_TYPES_NONZERO


class PointClass(str, enum.Enum):
    C = "C"
    T = "T"
    G3 = "3G"
    G1 = "1G"
    G0 = "0G"
    AXIS = "(q+1)G"
    TO = "TO"
    RC = "RC"
    IC = "IC"


class PlaneClass(str, enum.Enum):
    GAMMA = "G"
    C2 = "2C"
    C3 = "3C"
    C1BAR = "1C"
    C0 = "0C"


def expected_class_sizes(q: int) -> dict[LineClass, int]:
    """Class sizes of the classical line partition."""
    xi = -1 if q % 3 == 2 else q % 3
    sizes = {
        LineClass.RC: (q * q + q) // 2,
        LineClass.T: q + 1,
        LineClass.IC: (q * q - q) // 2,
        LineClass.UG: q * q + q,
        LineClass.UnG: q**3 - q,
        LineClass.EnG: (q * q - q) * (q * q - 1),
    }
    if xi == 0:
        sizes[LineClass.A] = 1
        sizes[LineClass.EA] = (q + 1) * (q * q - 1)
    else:
        sizes[LineClass.RA] = (q * q + q) // 2
        sizes[LineClass.IA] = (q * q - q) // 2
        sizes[LineClass.EG] = q**3 - q
    return {k: sizes[k] for k in line_types(xi)}


# ---------------------------------------------------------------------------
# quadratic extensions GF(q)[θ]/(θ^2 - sθ + n), vectorised over (s, n)


class _QuadExt:
    """Arithmetic on pairs (u, v) = u + vθ, one modulus per array slot."""

    def __init__(self, F: FieldSpec, s: np.ndarray, n: np.ndarray):
        self.F, self.s, self.n = F, s, n

    def mul(self, x, y):
        F = self.F
        (u1, v1), (u2, v2) = x, y
        vv = F.vmul(v1, v2)
        u = F.vsub(F.vmul(u1, u2), F.vmul(self.n, vv))
        v = F.vadd(F.vadd(F.vmul(u1, v2), F.vmul(u2, v1)), F.vmul(self.s, vv))
        return u, v

    def sub(self, x, y):
        return self.F.vsub(x[0], y[0]), self.F.vsub(x[1], y[1])

    def inv(self, x):
        # (u + vθ)^-1 = (u + v θbar) / N,  θbar = s - θ,  N = u^2 + uvs + v^2 n
        F = self.F
        u, v = x
        norm = F.vadd(F.vadd(F.vmul(u, u), F.vmul(F.vmul(u, v), self.s)), F.vmul(F.vmul(v, v), self.n))
        ninv = F.vinv(norm)
        return F.vmul(F.vadd(u, F.vmul(v, self.s)), ninv), F.vmul(F.vneg(v), ninv)

    def cubic_point(self, theta):
        one = (np.ones_like(self.s), np.zeros_like(self.s))
        t2 = self.mul(theta, theta)
        return [self.mul(t2, theta), t2, theta, one]


def irreducible_quadratics(F: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    """(s, n) of every irreducible x^2 - s x + n, sorted by (s, n)."""
    q = F.q
    r = np.arange(q)
    t1, t2 = (x.ravel() for x in np.meshgrid(r, r, indexing="ij"))
    split = np.zeros((q, q), dtype=bool)
    split[F.vadd(t1, t2), F.vmul(t1, t2)] = True
    s, n = np.nonzero(~split)
    return s.astype(F.dtype), n.astype(F.dtype)


def imaginary_chord_keys(F: FieldSpec) -> np.ndarray:
    """Chords through the conjugate root pairs of the irreducible quadratics.

    For each quadratic the roots θ, θbar = s - θ live in GF(q)[θ]; the chord
    P(θ)P(θbar) is computed there, scaled by the inverse of its leading
    coordinate and checked to be rational.
    """
    s, n = irreducible_quadratics(F)
    E = _QuadExt(F, s, n)
    zero = np.zeros_like(s)
    theta = (zero, np.ones_like(s))
    theta_bar = (s.copy(), F.vneg(np.ones_like(s)))
    X, Y = E.cubic_point(theta), E.cubic_point(theta_bar)

    pl = [E.sub(E.mul(X[i], Y[j]), E.mul(X[j], Y[i])) for i, j in PAIRS]
    # p01 = n^2 (θ - θbar) never vanishes for an irreducible quadratic
    lead_inv = E.inv(pl[0])
    scaled = [E.mul(c, lead_inv) for c in pl]
    if any(np.any(v != 0) for _, v in scaled):
        raise AssertionError("imaginary chord is not defined over the base field")
    coords = np.stack([u for u, _ in scaled], axis=1)
    return np.sort(encode(F, coords))


# ---------------------------------------------------------------------------
# the model


@dataclass(eq=False)
class CubicModel:
    field: FieldSpec
    params: list
    cubic_points: list[Point]
    osc_planes: list[Plane]
    tangents: list[PluckerLine]
    axis: PluckerLine | None

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def xi(self) -> int:
        return self.field.xi

    def point(self, t) -> Point:
        return self.cubic_points[self.params.index(t)]

    def osc_plane(self, t) -> Plane:
        return self.osc_planes[self.params.index(t)]

    def param_of(self, P: Point):
        """Curve parameter of a point of C, or None."""
        for t, Q in zip(self.params, self.cubic_points):
            if Q == P:
                return t
        return None

    # key tables ------------------------------------------------------------

    @functools.cached_property
    def real_chords(self) -> LineTable:
        pts = np.array([P.coords for P in self.cubic_points], dtype=self.field.dtype)
        i, j = np.triu_indices(len(pts), 1)
        return LineTable(self.field, line_keys_from_points(self.field, pts[i], pts[j]))

    @functools.cached_property
    def tangent_table(self) -> LineTable:
        return LineTable(self.field, [T.key for T in self.tangents])

    @functools.cached_property
    def imaginary_chords(self) -> LineTable:
        return LineTable(self.field, imaginary_chord_keys(self.field))

    @functools.cached_property
    def real_axes(self) -> LineTable:
        if self.xi == 0:
            raise WrongCharacteristic("q = 0 mod 3: the osculating planes form a pencil")
        pl = np.array([pi.coeffs for pi in self.osc_planes], dtype=self.field.dtype)
        i, j = np.triu_indices(len(pl), 1)
        return LineTable(self.field, line_keys_from_planes(self.field, pl[i], pl[j]))

    @functools.cached_property
    def imaginary_axes(self) -> LineTable:
        if self.xi == 0:
            raise WrongCharacteristic("q = 0 mod 3: the osculating planes form a pencil")
        coords = self.imaginary_chords.coords()
        return LineTable(self.field, polarity_lines(self.field, coords))

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "q": self.q,
            "xi": self.xi,
            "cubic_points": [{"t": t, "point": str(P)} for t, P in zip(self.params, self.cubic_points)],
            "osculating_planes": [{"t": t, "plane": str(pi)} for t, pi in zip(self.params, self.osc_planes)],
            "tangents": [{"t": t, "line": str(T)} for t, T in zip(self.params, self.tangents)],
            "axis": str(self.axis) if self.axis is not None else None,
        }


def osc_plane_coeffs(F: FieldSpec, t) -> tuple[int, ...]:
    if t == INF:
        return (0, 0, 0, 1)
    three = F.from_int(3)
    t2 = F.mul(t, t)
    return (1, F.neg(F.mul(three, t)), F.mul(three, t2), F.neg(F.mul(t2, t)))


def tangent_line(model_or_field, t) -> PluckerLine:
    """Tangent at P(t): joins P(t) to the derivative point (3t^2, 2t, 1, 0)."""
    F = model_or_field.field if isinstance(model_or_field, CubicModel) else model_or_field
    if t == INF:
        return line_from_points(Point(F, (1, 0, 0, 0)), Point(F, (0, 1, 0, 0)))
    d = (F.mul(F.from_int(3), F.mul(t, t)), F.mul(F.from_int(2), t), 1, 0)
    return line_from_points(Point(F, cubic_point_coords(F, t)), Point(F, d))


def _check_no_four_coplanar(F: FieldSpec, pts: list[Point], rng: random.Random) -> None:
    combos = itertools.combinations(range(len(pts)), 4)
    if F.q > 9:
        combos = [tuple(sorted(rng.sample(range(len(pts)), 4))) for _ in range(200)]
    for c in combos:
        if linalg.rank(F, [pts[i].coords for i in c]) != 4:
            raise AssertionError(f"cubic points {c} are coplanar")


def build_model(F: FieldSpec) -> CubicModel:
    params = list(range(F.q)) + [INF]
    pts = [Point(F, cubic_point_coords(F, t)) for t in params]
    planes = [Plane(F, osc_plane_coeffs(F, t)) for t in params]
    tangents = [tangent_line(F, t) for t in params]

    for P, pi, T in zip(pts, planes, tangents):
        assert incident_point_plane(P, pi)
        assert point_on_line(P, T) and line_in_plane(T, pi)
    _check_no_four_coplanar(F, pts, random.Random(F.q))

    axis = None
    common = linalg.rank(F, [pi.coeffs for pi in planes])
    if F.xi == 0:
        assert common == 2, "osculating planes should form a pencil"
        axis = line_from_planes(planes[0], planes[-1])
        assert all(line_in_plane(axis, pi) for pi in planes)
    else:
        assert common >= 3, "osculating planes share a line"
    return CubicModel(F, params, pts, planes, tangents, axis)


@functools.lru_cache(maxsize=8)
def model_for(F: FieldSpec) -> CubicModel:
    return build_model(F)


def enumerate_chords(model: CubicModel) -> tuple[LineTable, LineTable]:
    return model.real_chords, model.imaginary_chords


def enumerate_axes(model: CubicModel) -> tuple[LineTable, LineTable]:
    return model.real_axes, model.imaginary_axes


# ---------------------------------------------------------------------------
# scalar classification


def classify_line(model: CubicModel, line: PluckerLine) -> LineClass:
    on_c = [P for P in model.cubic_points if point_on_line(P, line)]
    if len(on_c) >= 2:
        assert len(on_c) == 2, "three collinear points on the cubic"
        return LineClass.RC
    if len(on_c) == 1:
        t = model.param_of(on_c[0])
        if line == model.tangents[model.params.index(t)]:
            return LineClass.T
        if any(line_in_plane(line, pi) for pi in model.osc_planes):
            return LineClass.UG
        return LineClass.UnG
    if line in model.imaginary_chords:
        return LineClass.IC
    if model.xi != 0:
        if line in model.imaginary_axes:
            return LineClass.IA
        if line in model.real_axes:
            return LineClass.RA
        if any(line_in_plane(line, pi) for pi in model.osc_planes):
            return LineClass.EG
        return LineClass.EnG
    if line == model.axis:
        return LineClass.A
    if lines_meet(line, model.axis):
        return LineClass.EA
    return LineClass.EnG


def classify_point(model: CubicModel, P: Point) -> PointClass:
    if P in model.cubic_points:
        return PointClass.C
    on_tangent = any(point_on_line(P, T) for T in model.tangents)
    if model.xi == 0:
        if point_on_line(P, model.axis):
            return PointClass.AXIS
        if on_tangent:
            return PointClass.TO
        if any(point_on_line(P, line) for line in model.real_chords):
            return PointClass.RC
        return PointClass.IC
    if on_tangent:
        return PointClass.T
    mu = sum(incident_point_plane(P, pi) for pi in model.osc_planes)
    return {3: PointClass.G3, 1: PointClass.G1, 0: PointClass.G0}[mu]


def classify_plane(model: CubicModel, pi: Plane) -> PlaneClass:
    if pi in model.osc_planes:
        return PlaneClass.GAMMA
    n = sum(incident_point_plane(P, pi) for P in model.cubic_points)
    return {3: PlaneClass.C3, 2: PlaneClass.C2, 1: PlaneClass.C1BAR, 0: PlaneClass.C0}[n]


# ---------------------------------------------------------------------------
# bulk classification


def _hits(table: LineTable, keys: np.ndarray) -> np.ndarray:
    idx = table.index_of(keys)
    assert np.all(idx >= 0)
    return idx


@dataclass
class LineCensus:
    lines: LineTable
    labels: np.ndarray  # positions into ALL_LINE_TYPES

    def members(self, cls: LineClass) -> LineTable:
        code = ALL_LINE_TYPES.index(cls)
        return LineTable(self.lines.field, self.lines.keys[self.labels == code], assume_sorted=True)

    def label_of(self, keys: np.ndarray) -> np.ndarray:
        idx = self.lines.index_of(keys)
        assert np.all(idx >= 0)
        return self.labels[idx]

    def counts(self) -> dict[LineClass, int]:
        xi = self.lines.field.xi
        bc = np.bincount(self.labels, minlength=len(ALL_LINE_TYPES))
        return {c: int(bc[ALL_LINE_TYPES.index(c)]) for c in line_types(xi)}


@functools.lru_cache(maxsize=4)
def line_census(model: CubicModel) -> LineCensus:
    """Type of every line of PG(3,q), by table lookups rather than per-line geometry."""
    F = model.field
    lines = all_lines(F)
    N = len(lines)

    star = np.concatenate([star_keys(F, P.coords) for P in model.cubic_points])
    n_on_c = np.bincount(_hits(lines, star), minlength=N)
    assert n_on_c.max() <= 2

    pencil = np.concatenate([star_keys(F, pi.coeffs, dual=True) for pi in model.osc_planes])
    in_gamma = np.zeros(N, dtype=bool)
    in_gamma[_hits(lines, pencil)] = True

    def member(table: LineTable) -> np.ndarray:
        m = np.zeros(N, dtype=bool)
        m[_hits(lines, table.keys)] = True
        return m

    code = {c: np.uint8(ALL_LINE_TYPES.index(c)) for c in ALL_LINE_TYPES}
    labels = np.full(N, 255, dtype=np.uint8)
    uni = n_on_c == 1
    ext = n_on_c == 0
    labels[n_on_c == 2] = code[LineClass.RC]
    is_t = member(model.tangent_table)
    labels[uni & is_t] = code[LineClass.T]
    labels[uni & ~is_t & in_gamma] = code[LineClass.UG]
    labels[uni & ~is_t & ~in_gamma] = code[LineClass.UnG]
    is_ic = ext & member(model.imaginary_chords)
    labels[is_ic] = code[LineClass.IC]
    rest = ext & ~is_ic
    if model.xi != 0:
        is_ia = rest & member(model.imaginary_axes)
        labels[is_ia] = code[LineClass.IA]
        rest &= ~is_ia
        is_ra = rest & member(model.real_axes)
        labels[is_ra] = code[LineClass.RA]
        rest &= ~is_ra
        labels[rest & in_gamma] = code[LineClass.EG]
        labels[rest & ~in_gamma] = code[LineClass.EnG]
    else:
        is_a = member(LineTable(F, [model.axis.key]))
        labels[rest & is_a] = code[LineClass.A]
        rest &= ~is_a
        meets = np.zeros(N, dtype=bool)
        axis_pts = model.axis.points()
        meets[_hits(lines, np.concatenate([star_keys(F, P.coords) for P in axis_pts]))] = True
        labels[rest & meets] = code[LineClass.EA]
        labels[rest & ~meets] = code[LineClass.EnG]
    assert not np.any(labels == 255)
    return LineCensus(lines, labels)


def census(model: CubicModel) -> dict[LineClass, int]:
    return line_census(model).counts()


def _incidence_counts(F: FieldSpec, rows: np.ndarray, others: list) -> np.ndarray:
    """For each row vector, how many of the given vectors are orthogonal to it."""
    M = [list(col) for col in zip(*others)]
    dots = matmul_rows(F, rows, M)
    return np.count_nonzero(dots == 0, axis=1)


def _span_point_keys(F: FieldSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Keys of every point on the lines X_n Y_n."""
    X = np.asarray(X, dtype=F.dtype)
    Y = np.asarray(Y, dtype=F.dtype)
    blocks = [Y]
    for lam in range(F.q):
        blocks.append(F.vadd(X, F.vmul(Y, lam)))
    return np.unique(encode(F, normalize_rows(F, np.concatenate(blocks))))


def point_census(model: CubicModel) -> dict[PointClass, int]:
    F = model.field
    pts = point_array(F)
    keys = encode(F, pts)
    cpts = np.array([P.coords for P in model.cubic_points], dtype=F.dtype)
    on_c = np.isin(keys, encode(F, cpts))
    tx = np.array([T.span[0].coords for T in model.tangents], dtype=F.dtype)
    ty = np.array([T.span[1].coords for T in model.tangents], dtype=F.dtype)
    on_t = np.isin(keys, _span_point_keys(F, tx, ty)) & ~on_c
    labels = np.empty(len(pts), dtype=object)
    if model.xi == 0:
        i, j = np.triu_indices(len(cpts), 1)
        on_rc = np.isin(keys, _span_point_keys(F, cpts[i], cpts[j])) & ~on_c
        ax = model.axis.span
        on_axis = np.isin(keys, _span_point_keys(F, np.array([ax[0].coords]), np.array([ax[1].coords])))
        labels[:] = PointClass.IC
        labels[on_rc] = PointClass.RC
        labels[on_t] = PointClass.TO
        labels[on_axis] = PointClass.AXIS
    else:
        mu = _incidence_counts(F, pts, [pi.coeffs for pi in model.osc_planes])
        labels[mu == 0] = PointClass.G0
        labels[mu == 1] = PointClass.G1
        labels[mu == 3] = PointClass.G3
        labels[on_t] = PointClass.T
    labels[on_c] = PointClass.C
    out: dict[PointClass, int] = {}
    for lab in labels:
        out[lab] = out.get(lab, 0) + 1
    return out


def plane_census(model: CubicModel) -> dict[PlaneClass, int]:
    F = model.field
    planes = point_array(F)
    n = _incidence_counts(F, planes, [P.coords for P in model.cubic_points])
    is_osc = np.isin(encode(F, planes), encode(F, np.array([pi.coeffs for pi in model.osc_planes])))
    out = {PlaneClass.GAMMA: int(is_osc.sum())}
    for k, lab in ((2, PlaneClass.C2), (3, PlaneClass.C3), (1, PlaneClass.C1BAR), (0, PlaneClass.C0)):
        out[lab] = int(np.count_nonzero((n == k) & ~is_osc))
    return out
