"""Small exact matrix helpers over Fraction (lists of rows)."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .poly import as_fraction

Matrix = list  # list[list[Fraction]]


class SingularMatrixError(ValueError):
    pass


def to_matrix(rows) -> Matrix:
    m = [[as_fraction(v) for v in row] for row in rows]
    if m and any(len(r) != len(m[0]) for r in m):
        raise ValueError("ragged matrix")
    return m


def to_vector(vals) -> list:
    return [as_fraction(v) for v in vals]


def is_square(m: Matrix) -> bool:
    return all(len(r) == len(m) for r in m)


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> Matrix:
    return [[Fraction(0)] * c for _ in range(r)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a and len(a[0]) != len(b):
        raise ValueError("shape mismatch in matmul")
    width = len(b[0]) if b else 0
    sparse_b = [[(j, y) for j, y in enumerate(brow) if y] for brow in b]
    out = []
    for row in a:
        acc = [Fraction(0)] * width
        for x, brow in zip(row, sparse_b):
            if x:
                for j, y in brow:
                    acc[j] += x * y
        out.append(acc)
    return out


def matvec(a: Matrix, v: Sequence) -> list:
    return [sum((x * y for x, y in zip(row, v) if x and y), Fraction(0)) for row in a]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def blockdiag(*blocks: Matrix) -> Matrix:
    n = sum(len(b) for b in blocks)
    out = zeros(n, n)
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[off + i][off + j] = v
        off += len(b)
    return out


def permutation_matrix(perm: Sequence[int]) -> Matrix:
    """Matrix P with (P x)[perm[i]] = x[i]."""
    n = len(perm)
    out = zeros(n, n)
    for i, p in enumerate(perm):
        out[p][i] = Fraction(1)
    return out


def swap_permutation(n: int, i: int, j: int) -> list[int]:
    perm = list(range(n))
    perm[i], perm[j] = perm[j], perm[i]
    return perm


def rank(a: Matrix) -> int:
    m = [list(map(as_fraction, r)) for r in a]
    rk = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((r for r in range(rk, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        inv = 1 / m[rk][c]
        for r in range(rk + 1, len(m)):
            if m[r][c]:
                f = m[r][c] * inv
                m[r] = [x - f * y for x, y in zip(m[r], m[rk])]
        rk += 1
    return rk


def inverse(a: Matrix) -> Matrix:
    """Gauss-Jordan inverse; raises SingularMatrixError on exact singularity."""
    n = len(a)
    if not is_square(a):
        raise ValueError("matrix is not square")
    m = [list(map(as_fraction, row)) + identity(n)[i] for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"
