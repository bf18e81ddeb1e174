"""Exact linear algebra over the rationals.

Rank uses fraction-free (Bareiss) elimination on integer rows obtained by
clearing denominators row by row, which leaves the rank unchanged.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


def integer_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators."""
    out = []
    for row in rows:
        fr = [x if isinstance(x, Fraction) else Fraction(x) for x in row]
        m = lcm(*(x.denominator for x in fr)) if fr else 1
        out.append([int(x * m) for x in fr])
    return out


def int_rank(rows: list[list[int]]) -> int:
    """Rank of an integer matrix by Bareiss elimination. Consumes ``rows``."""
    if not rows:
        return 0
    m, n = len(rows), len(rows[0])
    rank = 0
    prev = 1
    for col in range(n):
        if rank == m:
            break
        pivot = None
        for i in range(rank, m):
            if rows[i][col]:
                pivot = i
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][col]
        prow = rows[rank]
        for i in range(rank + 1, m):
            row = rows[i]
            f = row[col]
            for j in range(col + 1, n):
                row[j] = (p * row[j] - f * prow[j]) // prev
            row[col] = 0
        prev = p
        rank += 1
    return rank


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank of a matrix with int or Fraction entries."""
    return int_rank(integer_rows(rows))


def rref(rows: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    """Reduced row-echelon form with zero rows dropped (a canonical span key)."""
    mat = [[Fraction(x) for x in row] for row in rows]
    if not mat:
        return ()
    m, n = len(mat), len(mat[0])
    r = 0
    for col in range(n):
        pivot = next((i for i in range(r, m) if mat[i][col] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        pv = mat[r][col]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(m):
            if i != r and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        r += 1
        if r == m:
            break
    return tuple(tuple(row) for row in mat[:r])


def minors_2x2(rows: Sequence[Sequence]) -> list:
    """All 2x2 minors of a two-row matrix."""
    top, bottom = rows
    n = len(top)
    return [top[i] * bottom[j] - top[j] * bottom[i] for i in range(n) for j in range(i + 1, n)]


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))
