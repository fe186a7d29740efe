"""Orbit decomposition of sets of lines, points or planes under the cubic's group.

Two strategies give the same partition:

* ``bfs``: each generator becomes a permutation of the universe (by key
  lookup) and orbits are the connected components of the resulting graph.
* ``expand``: repeatedly take the least unassigned key and sweep it through
  every group element.
"""
from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .action import (
    GroupElement,
    apply_lines,
    apply_planes,
    apply_points,
    generators,
    group_matrices,
    images_of_point,
    line_orbit_keys,
    matrices_of,
)
from .gf import FieldSpec
from .pg3 import LineTable, PluckerLine, decode, encode, normalize_rows

KINDS = {"lines": 6, "points": 4, "planes": 4}

# above this order bfs over a whole class gets memory hungry
BFS_LIMIT = 37


class NotClosed(ValueError):
    """A group image fell outside the universe being decomposed."""


def member_digest(keys: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(np.sort(keys), dtype="<i8").tobytes()).hexdigest()


@dataclass(frozen=True)
class OrbitRecord:
    representative: int
    size: int
    digest: str


@dataclass
class OrbitPartition:
    field: FieldSpec
    universe_label: str
    kind: str
    method: str
    orbits: list[OrbitRecord]
    members: list[np.ndarray] = field(default_factory=list, repr=False)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def sizes(self) -> list[int]:
        return sorted(o.size for o in self.orbits)

    def signature(self) -> tuple:
        """Method-independent fingerprint of the partition."""
        return tuple((o.representative, o.size, o.digest) for o in self.orbits)

    def digest(self) -> str:
        return hashlib.sha256(repr(self.signature()).encode()).hexdigest()

    def orbit_of(self, key: int) -> int:
        for i, m in enumerate(self.members):
            j = np.searchsorted(m, key)
            if j < m.size and m[j] == key:
                return i
        raise KeyError(key)

    def to_json(self, dump_members: bool = False) -> dict:
        width = KINDS[self.kind]
        out = {
            "q": self.q,
            "class": self.universe_label,
            "kind": self.kind,
            "method": self.method,
            "orbits": [],
        }
        for i, o in enumerate(self.orbits):
            rec = {
                "representative": _key_str(self.field, o.representative, width),
                "key": o.representative,
                "size": o.size,
                "digest": o.digest,
            }
            if dump_members:
                rec["members"] = [int(k) for k in self.members[i]]
            out["orbits"].append(rec)
        return out

    def dumps(self, dump_members: bool = False) -> str:
        return json.dumps(self.to_json(dump_members), indent=2, sort_keys=True)


def _key_str(F: FieldSpec, key: int, width: int) -> str:
    return ":".join(str(int(v)) for v in decode(F, np.array([key]), width)[0])


def _as_keys(universe) -> np.ndarray:
    if isinstance(universe, LineTable):
        return universe.keys
    keys = np.asarray(universe, dtype=np.int64)
    if keys.size > 1 and np.any(np.diff(keys) <= 0):
        keys = np.unique(keys)
    return keys


def _image_keys(F: FieldSpec, kind: str, coords: np.ndarray, g: GroupElement) -> np.ndarray:
    if kind == "lines":
        return apply_lines(F, coords, g)
    if kind == "points":
        return encode(F, apply_points(F, coords, g))
    return encode(F, apply_planes(F, coords, g))


def _permutation(F, kind, keys, coords, g, workers) -> np.ndarray:
    chunks = np.array_split(np.arange(keys.size), max(1, workers))

    def run(idx):
        return _image_keys(F, kind, coords[idx], g)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            images = np.concatenate(list(pool.map(run, chunks)))
    else:
        images = run(np.arange(keys.size))
    pos = np.searchsorted(keys, images)
    pos = np.minimum(pos, keys.size - 1)
    if not np.all(keys[pos] == images):
        raise NotClosed(f"{g} maps part of the universe outside it")
    return pos


def _group_stack(F: FieldSpec, kind: str, group) -> np.ndarray:
    mats = group_matrices(F) if group is None else matrices_of(F, list(group))
    # the group is closed under inversion, so c -> c M^T sweeps the same plane orbit
    return np.ascontiguousarray(mats.transpose(0, 2, 1)) if kind == "planes" else mats


def _orbit_keys(F: FieldSpec, kind: str, key: int, mats: np.ndarray) -> np.ndarray:
    width = KINDS[kind]
    row = decode(F, np.array([key]), width)[0]
    if kind == "lines":
        return line_orbit_keys(F, PluckerLine(F, tuple(int(v) for v in row)), mats)
    return np.unique(encode(F, normalize_rows(F, images_of_point(F, [int(v) for v in row], mats))))


def _records(keys: np.ndarray, labels: np.ndarray) -> tuple[list[OrbitRecord], list[np.ndarray]]:
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    groups = np.split(order, bounds)
    members = [keys[g] for g in groups]  # keys sorted, so each member list is sorted
    members.sort(key=lambda m: int(m[0]))
    recs = [OrbitRecord(int(m[0]), int(m.size), member_digest(m)) for m in members]
    return recs, members


def decompose(
    F: FieldSpec,
    universe,
    group: Sequence[GroupElement] | None = None,
    *,
    method: str = "auto",
    kind: str = "lines",
    label: str = "all",
    workers: int = 1,
) -> OrbitPartition:
    """Partition ``universe`` (keys or a LineTable) into orbits.

    ``group`` is None for the full group, otherwise a list of elements: for
    ``bfs`` they act as generators, for ``expand`` they must be the whole
    (sub)group.  Representatives are the least key of each orbit.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if method == "auto":
        method = "bfs" if F.q <= BFS_LIMIT else "expand"
    keys = _as_keys(universe)
    if keys.size == 0:
        return OrbitPartition(F, label, kind, method, [], [])
    if method == "bfs":
        labels = _bfs_labels(F, kind, keys, group, workers)
    elif method == "expand":
        labels = _expand_labels(F, kind, keys, group)
    else:
        raise ValueError(f"unknown method {method!r}")
    recs, members = _records(keys, labels)
    return OrbitPartition(F, label, kind, method, recs, members)


def _bfs_labels(F, kind, keys, group, workers) -> np.ndarray:
    gens = generators(F) if group is None else list(group)
    coords = decode(F, keys, KINDS[kind])
    n = keys.size
    src = np.arange(n)
    rows, cols = [src], [src]
    for g in gens:
        rows.append(src)
        cols.append(_permutation(F, kind, keys, coords, g, workers))
    r, c = np.concatenate(rows), np.concatenate(cols)
    graph = coo_matrix((np.ones(r.size, dtype=np.int8), (r, c)), shape=(n, n)).tocsr()
    _, labels = connected_components(graph, directed=True, connection="weak")
    return labels


def _expand_labels(F, kind, keys, group) -> np.ndarray:
    mats = _group_stack(F, kind, group)
    labels = np.full(keys.size, -1, dtype=np.int64)
    nxt = 0
    while True:
        free = np.flatnonzero(labels < 0)
        if free.size == 0:
            return labels
        orbit = _orbit_keys(F, kind, int(keys[free[0]]), mats)
        pos = np.searchsorted(keys, orbit)
        pos = np.minimum(pos, keys.size - 1)
        if not np.all(keys[pos] == orbit):
            raise NotClosed(f"orbit of key {int(keys[free[0]])} leaves the universe")
        labels[pos] = nxt
        nxt += 1


def expand_representative(F: FieldSpec, line: PluckerLine, group: Sequence[GroupElement] | None = None) -> LineTable:
    """Full orbit of one line under the group (or under an explicit element list)."""
    mats = group_matrices(F) if group is None else matrices_of(F, list(group))
    return LineTable(F, line_orbit_keys(F, line, mats), assume_sorted=True)


def orbit_of_suborbit(F: FieldSpec, line: PluckerLine, stab: Sequence[GroupElement],
                      group: Sequence[GroupElement] | None = None) -> tuple[int, int]:
    """Sizes of the orbit of ``line`` under ``stab`` and under the whole group."""
    sub = len(expand_representative(F, line, stab))
    full = len(expand_representative(F, line, group))
    return sub, full
