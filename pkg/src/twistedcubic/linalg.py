"""Small dense matrices over GF(q), as lists of index rows."""
from __future__ import annotations

from typing import Sequence

from .gf import DivideByZero, FieldSpec

Matrix = list[list[int]]


def matmul(F: FieldSpec, A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    n, m, k = len(A), len(B[0]), len(B)
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            acc = 0
            for t in range(k):
                acc = F.add(acc, F.mul(A[i][t], B[t][j]))
            out[i][j] = acc
    return out


def vecmat(F: FieldSpec, x: Sequence[int], M: Sequence[Sequence[int]]) -> list[int]:
    return matmul(F, [list(x)], M)[0]


def matvec(F: FieldSpec, M: Sequence[Sequence[int]], x: Sequence[int]) -> list[int]:
    return [row[0] for row in matmul(F, M, [[v] for v in x])]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _echelon(F: FieldSpec, rows: Sequence[Sequence[int]], ncols: int) -> tuple[Matrix, list[int]]:
    A = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        s = F.inv(A[r][c])
        A[r] = [F.mul(s, v) for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [F.sub(a, F.mul(f, b)) for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A, pivots


def rank(F: FieldSpec, rows: Sequence[Sequence[int]]) -> int:
    if not rows:
        return 0
    return len(_echelon(F, rows, len(rows[0]))[1])


def inverse(F: FieldSpec, M: Sequence[Sequence[int]]) -> Matrix:
    """Gauss-Jordan inverse; raises DivideByZero for singular input."""
    n = len(M)
    aug = [list(M[i]) + identity(n)[i] for i in range(n)]
    A, pivots = _echelon(F, aug, n)
    if pivots != list(range(n)):
        raise DivideByZero("singular matrix")
    return [row[n:] for row in A]


def scalar_multiple(F: FieldSpec, A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> int | None:
    """The nonzero s with A == s*B entrywise, or None if there is none."""
    s = None
    for ra, rb in zip(A, B):
        for a, b in zip(ra, rb):
            if b == 0:
                if a != 0:
                    return None
                continue
            r = F.div(a, b)
            if r == 0 or (s is not None and r != s):
                return None
            s = r
    return s
