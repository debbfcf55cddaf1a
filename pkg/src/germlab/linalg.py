"""Small exact linear algebra over Fraction: rank, solve, nullspace."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Tuple


def _rref(M: List[List[Fraction]]) -> Tuple[List[List[Fraction]], List[int]]:
    A = [[Fraction(x) for x in row] for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return A, pivots


def rank(M: List[List[Fraction]]) -> int:
    return len(_rref(M)[1])


def solve_consistent(M: List[List[Fraction]], y: List[Fraction]) -> Optional[List[Fraction]]:
    """One exact solution of M x = y, or None when the system is inconsistent.

    Free variables are set to zero.
    """
    rows = len(M)
    cols = len(M[0]) if rows else 0
    aug = [list(M[i]) + [Fraction(y[i])] for i in range(rows)]
    R, pivots = _rref(aug)
    for i in range(len(pivots), rows):
        if R[i][cols] != 0 and all(R[i][j] == 0 for j in range(cols)):
            return None
    if pivots and pivots[-1] == cols:
        return None  # pivot in the augmented column
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = R[i][cols]
    # verify (guards against a pivot list that stopped early)
    for i in range(rows):
        if sum(M[i][j] * x[j] for j in range(cols)) != y[i]:
            return None
    return x


def nullspace(M: List[List[Fraction]]) -> List[List[Fraction]]:
    """Basis of the exact kernel of M."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    R, pivots = _rref(M)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][fc]
        basis.append(v)
    return basis
