"""
Exact linear algebra over any field element type that supports
+ - * inverse() and truthiness (RationalFunction, KElement, ...).

Elimination is pivot-normalized: pivot rows are scaled to a leading 1,
and RationalFunction reduces every intermediate fraction eagerly.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

from app.services.scalar import CharTwoField

logger = logging.getLogger(__name__)

Matrix = List[List[CharTwoField]]


def reduced_row_echelon(matrix: Sequence[Sequence[CharTwoField]]) -> Tuple[Matrix, List[int]]:
    """Gauss-Jordan elimination; returns (rref rows, pivot columns)"""
    m = [list(row) for row in matrix]
    if not m:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    pivots: List[int] = []
    r = 0
    for c in range(n_cols):
        pivot_row = next((i for i in range(r, n_rows) if m[i][c]), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv if x else x for x in m[r]]
        for i in range(n_rows):
            f = m[i][c]
            if i != r and f:
                m[i] = [x - f * y if y else x for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return m, pivots


def rank(matrix: Sequence[Sequence[CharTwoField]]) -> int:
    return len(reduced_row_echelon(matrix)[1])


def nullspace(
    matrix: Sequence[Sequence[CharTwoField]],
    n_cols: int,
    zero: CharTwoField,
    one: CharTwoField,
) -> List[List[CharTwoField]]:
    """Basis of {v : matrix v = 0}"""
    if not matrix:
        return [[one if i == j else zero for i in range(n_cols)] for j in range(n_cols)]
    rref, pivots = reduced_row_echelon(matrix)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * n_cols
        v[f] = one
        for row, p in zip(rref, pivots):
            if row[f]:
                v[p] = zero - row[f]
        basis.append(v)
    return basis


def solve(
    matrix: Sequence[Sequence[CharTwoField]],
    rhs: Sequence[CharTwoField],
    zero: CharTwoField,
) -> Optional[List[CharTwoField]]:
    """One solution of matrix x = rhs (free variables 0), None if inconsistent"""
    n_cols = len(matrix[0]) if matrix else 0
    augmented = [list(row) + [b] for row, b in zip(matrix, rhs)]
    rref, pivots = reduced_row_echelon(augmented)
    if n_cols in pivots:
        return None
    x = [zero] * n_cols
    for row, p in zip(rref, pivots):
        x[p] = row[n_cols]
    return x


class SparseEliminator:
    """
    Incremental row echelon form for large sparse systems.

    Rows are dicts column -> value, the right-hand side lives in column
    n_cols. Every stored pivot row has its pivot as its smallest column,
    so reducing an incoming row by its smallest pivot column only ever
    introduces larger columns and the reduction terminates.
    """

    def __init__(self, n_cols: int, zero: CharTwoField):
        self.n_cols = n_cols
        self.zero = zero
        self.pivots: Dict[int, Dict[int, CharTwoField]] = {}
        self.inconsistent = False
        self.rows_seen = 0

    def add_row(self, row: Dict[int, CharTwoField]) -> None:
        self.rows_seen += 1
        current = {k: v for k, v in row.items() if v}
        while True:
            hits = [c for c in current if c in self.pivots]
            if not hits:
                break
            c = min(hits)
            f = current[c]
            for k, v in self.pivots[c].items():
                nv = current.get(k, self.zero) - f * v
                if nv:
                    current[k] = nv
                else:
                    current.pop(k, None)
        if not current:
            return
        pivot = min(current)
        if pivot == self.n_cols:
            self.inconsistent = True
            return
        inv = current[pivot].inverse()
        self.pivots[pivot] = {k: v * inv for k, v in current.items()}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def solution(self) -> Optional[List[CharTwoField]]:
        if self.inconsistent:
            return None
        x = [self.zero] * self.n_cols
        for p in sorted(self.pivots, reverse=True):
            row = self.pivots[p]
            value = row.get(self.n_cols, self.zero)
            for k, v in row.items():
                if k != p and k != self.n_cols and x[k]:
                    value = value - v * x[k]
            x[p] = value
        return x
